#include "vortexflow/snapshot.hpp"

#include <charconv>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "vortexflow/util.hpp"

namespace vortexflow {

namespace {

constexpr char kBinaryMagic[8] = {'V', 'F', 'S', 'N', 'A', 'P', '0', '1'};
constexpr const char* kTextMagic = "VFSNAPCSV01";

void put_i32(std::ostream& out, std::int32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_f64(std::ostream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::int32_t get_i32(std::istream& in) {
  std::int32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

double get_f64(std::istream& in) {
  double v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double_tok(const std::string& tok) {
  double v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size())
    throw IoError("snapshot: bad numeric token '" + tok + "'");
  return v;
}

void save_binary(const std::string& path, const FlowState& st) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  const TorusGrid& g = st.x.grid();
  const ActionSpec& spec = st.x.action();
  out.write(kBinaryMagic, sizeof kBinaryMagic);
  put_i32(out, g.nx);
  put_i32(out, g.ny);
  put_f64(out, g.lx);
  put_f64(out, g.ly);
  put_i32(out, spec.k);
  put_i32(out, spec.n);
  for (int w : spec.W) put_i32(out, w);
  for (double t : spec.tau) put_f64(out, t);
  for (int d : spec.degrees) put_i32(out, d);
  put_f64(out, st.t);
  put_f64(out, st.dt);
  put_f64(out, st.kn);
  for (double v : st.s.v) put_f64(out, v);
  for (double v : st.x.A.a.vx) put_f64(out, v);
  for (double v : st.x.A.a.vy) put_f64(out, v);
  const auto* u = reinterpret_cast<const double*>(st.x.u.u.v.data());
  out.write(reinterpret_cast<const char*>(u),
            static_cast<std::streamsize>(2 * st.x.u.u.v.size() * sizeof(double)));
  if (!out) throw IoError("write failure on '" + path + "'");
}

void save_text(const std::string& path, const FlowState& st) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  const TorusGrid& g = st.x.grid();
  const ActionSpec& spec = st.x.action();
  out << kTextMagic << "\n";
  out << "grid " << g.nx << " " << g.ny << " " << fmt17(g.lx) << " "
      << fmt17(g.ly) << "\n";
  out << "group " << spec.k << " " << spec.n << "\n";
  out << "W";
  for (int w : spec.W) out << " " << w;
  out << "\ntau";
  for (double t : spec.tau) out << " " << fmt17(t);
  out << "\ndegrees";
  for (int d : spec.degrees) out << " " << d;
  out << "\nstate " << fmt17(st.t) << " " << fmt17(st.dt) << " " << fmt17(st.kn)
      << "\n";
  out << "s";
  for (double v : st.s.v) out << " " << fmt17(v);
  out << "\nax";
  for (double v : st.x.A.a.vx) out << " " << fmt17(v);
  out << "\nay";
  for (double v : st.x.A.a.vy) out << " " << fmt17(v);
  out << "\nu";
  for (const cdouble& z : st.x.u.u.v)
    out << " " << fmt17(z.real()) << " " << fmt17(z.imag());
  out << "\n";
  if (!out) throw IoError("write failure on '" + path + "'");
}

void check_dims(int nx, int ny, int k, int n) {
  if (nx < 4 || ny < 4 || nx > (1 << 20) || ny > (1 << 20) || k < 1 || n < 1 ||
      k > 65536 || n > 65536)
    throw IoError("snapshot: implausible dimensions in header");
}

FlowState assemble(int nx, int ny, double lx, double ly, int k, int n,
                   std::vector<int> W, std::vector<double> tau,
                   std::vector<int> degrees) {
  try {
    TorusGrid g(nx, ny, lx, ly);
    ActionSpec spec(k, n, std::move(W), std::move(tau), std::move(degrees));
    return FlowState(Pair(g, spec));
  } catch (const Error& e) {
    throw IoError(std::string("snapshot: invalid header data: ") + e.what());
  }
}

FlowState load_binary(std::ifstream& in, const std::string& path) {
  const int nx = get_i32(in), ny = get_i32(in);
  const double lx = get_f64(in), ly = get_f64(in);
  const int k = get_i32(in), n = get_i32(in);
  if (!in) throw IoError("snapshot '" + path + "': truncated header");
  check_dims(nx, ny, k, n);
  std::vector<int> W(static_cast<size_t>(k) * n);
  std::vector<double> tau(k);
  std::vector<int> degrees(k);
  for (auto& w : W) w = get_i32(in);
  for (auto& t : tau) t = get_f64(in);
  for (auto& d : degrees) d = get_i32(in);
  FlowState st = assemble(nx, ny, lx, ly, k, n, std::move(W), std::move(tau),
                          std::move(degrees));
  st.t = get_f64(in);
  st.dt = get_f64(in);
  st.kn = get_f64(in);
  for (auto& v : st.s.v) v = get_f64(in);
  for (auto& v : st.x.A.a.vx) v = get_f64(in);
  for (auto& v : st.x.A.a.vy) v = get_f64(in);
  auto* u = reinterpret_cast<double*>(st.x.u.u.v.data());
  in.read(reinterpret_cast<char*>(u),
          static_cast<std::streamsize>(2 * st.x.u.u.v.size() * sizeof(double)));
  if (!in) throw IoError("snapshot '" + path + "': truncated payload");
  return st;
}

std::vector<std::string> tagged_tokens(std::istream& in, const std::string& tag,
                                       const std::string& path) {
  std::string line;
  if (!std::getline(in, line))
    throw IoError("snapshot '" + path + "': missing '" + tag + "' record");
  std::istringstream ls(line);
  std::string got;
  ls >> got;
  if (got != tag)
    throw IoError("snapshot '" + path + "': expected '" + tag + "', got '" +
                  got + "'");
  std::vector<std::string> toks;
  std::string t;
  while (ls >> t) toks.push_back(t);
  return toks;
}

FlowState load_text(std::ifstream& in, const std::string& path) {
  auto grid_t = tagged_tokens(in, "grid", path);
  auto group_t = tagged_tokens(in, "group", path);
  if (grid_t.size() != 4 || group_t.size() != 2)
    throw IoError("snapshot '" + path + "': malformed grid/group record");
  const int nx = static_cast<int>(parse_double_tok(grid_t[0]));
  const int ny = static_cast<int>(parse_double_tok(grid_t[1]));
  const double lx = parse_double_tok(grid_t[2]);
  const double ly = parse_double_tok(grid_t[3]);
  const int k = static_cast<int>(parse_double_tok(group_t[0]));
  const int n = static_cast<int>(parse_double_tok(group_t[1]));
  check_dims(nx, ny, k, n);

  auto W_t = tagged_tokens(in, "W", path);
  auto tau_t = tagged_tokens(in, "tau", path);
  auto deg_t = tagged_tokens(in, "degrees", path);
  if (W_t.size() != static_cast<size_t>(k) * n || tau_t.size() != static_cast<size_t>(k) ||
      deg_t.size() != static_cast<size_t>(k))
    throw IoError("snapshot '" + path + "': group data has wrong length");
  std::vector<int> W, degrees;
  std::vector<double> tau;
  for (const auto& t : W_t) W.push_back(static_cast<int>(parse_double_tok(t)));
  for (const auto& t : tau_t) tau.push_back(parse_double_tok(t));
  for (const auto& t : deg_t)
    degrees.push_back(static_cast<int>(parse_double_tok(t)));
  FlowState st = assemble(nx, ny, lx, ly, k, n, std::move(W), std::move(tau),
                          std::move(degrees));

  auto state_t = tagged_tokens(in, "state", path);
  if (state_t.size() != 3)
    throw IoError("snapshot '" + path + "': malformed state record");
  st.t = parse_double_tok(state_t[0]);
  st.dt = parse_double_tok(state_t[1]);
  st.kn = parse_double_tok(state_t[2]);

  auto fill_real = [&](const std::string& tag, std::vector<double>& dst) {
    auto toks = tagged_tokens(in, tag, path);
    if (toks.size() != dst.size())
      throw IoError("snapshot '" + path + "': '" + tag + "' has wrong length");
    for (size_t m = 0; m < dst.size(); ++m) dst[m] = parse_double_tok(toks[m]);
  };
  fill_real("s", st.s.v);
  fill_real("ax", st.x.A.a.vx);
  fill_real("ay", st.x.A.a.vy);
  auto u_t = tagged_tokens(in, "u", path);
  if (u_t.size() != 2 * st.x.u.u.v.size())
    throw IoError("snapshot '" + path + "': 'u' has wrong length");
  for (size_t m = 0; m < st.x.u.u.v.size(); ++m)
    st.x.u.u.v[m] = cdouble(parse_double_tok(u_t[2 * m]),
                            parse_double_tok(u_t[2 * m + 1]));
  return st;
}

}  // namespace

void save_snapshot(const std::string& path, const FlowState& st, bool binary) {
  if (binary)
    save_binary(path, st);
  else
    save_text(path, st);
}

FlowState load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open snapshot '" + path + "'");
  char magic[8] = {};
  in.read(magic, sizeof magic);
  if (in && std::memcmp(magic, kBinaryMagic, sizeof magic) == 0)
    return load_binary(in, path);

  std::ifstream txt(path);
  if (!txt) throw IoError("cannot open snapshot '" + path + "'");
  std::string first;
  if (!std::getline(txt, first))
    throw IoError("snapshot '" + path + "': empty file");
  if (!first.empty() && first.back() == '\r') first.pop_back();
  if (first != kTextMagic)
    throw IoError("snapshot '" + path + "': unrecognized format");
  return load_text(txt, path);
}

}  // namespace vortexflow
