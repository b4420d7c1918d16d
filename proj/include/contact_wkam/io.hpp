#ifndef CONTACT_WKAM_IO_HPP
#define CONTACT_WKAM_IO_HPP

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>

#include "contact_wkam/action.hpp"
#include "contact_wkam/flow.hpp"
#include "contact_wkam/sets.hpp"

namespace wkam {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {
inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << std::setprecision(17);
  return out;
}
inline void write_hash_header(std::ofstream& out, std::uint64_t config_hash) {
  out << "# config_hash=" << std::hex << config_hash << std::dec << "\n";
}
}  // namespace detail

inline void write_grid_csv(const std::string& path, const GridFunction& g,
                           std::uint64_t config_hash = 0, const std::string& value_name = "value") {
  auto out = detail::open_out(path);
  detail::write_hash_header(out, config_hash);
  out << "x," << value_name << "\n";
  for (int i = 0; i < g.size(); ++i) out << g.domain.x(i) << "," << g[i] << "\n";
}

inline void write_columns_csv(const std::string& path, const CircleDomain& dom,
                              const std::vector<std::string>& names,
                              const std::vector<const GridFunction*>& cols,
                              std::uint64_t config_hash = 0) {
  if (names.size() != cols.size())
    throw IoError("write_columns_csv: names/columns mismatch");
  auto out = detail::open_out(path);
  detail::write_hash_header(out, config_hash);
  out << "x";
  for (const auto& n : names) out << "," << n;
  out << "\n";
  for (int i = 0; i < dom.n_points; ++i) {
    out << dom.x(i);
    for (const GridFunction* c : cols) out << "," << (*c)[i];
    out << "\n";
  }
}

inline void write_trajectory_csv(const std::string& path, const HamiltonianModel& model,
                                 const Trajectory& traj, std::uint64_t config_hash = 0) {
  auto out = detail::open_out(path);
  detail::write_hash_header(out, config_hash);
  out << "t,x,p,u,H\n";
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const PhaseState& s = traj.states[i];
    out << traj.time(i) << "," << s.x << "," << s.p << "," << s.u << ","
        << model.hamiltonian(s.x, s.p, s.u) << "\n";
  }
}

inline void write_set_report_csv(const std::string& path, const SetReport& rep,
                                 std::uint64_t config_hash = 0) {
  auto out = detail::open_out(path);
  detail::write_hash_header(out, config_hash);
  out << "x,mane,aubry,strongly_static,mather,a_gap,b_gap\n";
  for (int i = 0; i < rep.domain.n_points; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double bg = rep.b_gap[k] >= 1e300 ? -1.0 : rep.b_gap[k];  // -1 = not probed
    out << rep.domain.x(i) << "," << int(rep.mane[k]) << "," << int(rep.aubry[k]) << ","
        << int(rep.strongly_static[k]) << "," << int(rep.mather_candidate[k]) << ","
        << rep.a_gap[k] << "," << bg << "\n";
  }
}

inline void write_field_slice_csv(const std::string& path, const ActionField& field, int step,
                                  std::uint64_t config_hash = 0) {
  auto out = detail::open_out(path);
  detail::write_hash_header(out, config_hash);
  out << "x,value\n";
  for (int i = 0; i < field.domain.n_points; ++i)
    if (field.is_reached(step, i))
      out << field.domain.x(i) << "," << field.value(step, i) << "\n";
}

/// Binary field layout: a fixed header (origin index, origin u, direction,
/// dt, n_points, n_steps) followed by row-major values and reached flags.
inline void write_field_binary(const std::string& path, const ActionField& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  const char magic[8] = {'W', 'K', 'A', 'M', 'F', 'L', 'D', '1'};
  out.write(magic, 8);
  auto put = [&](const void* p, std::size_t n) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  };
  const std::int32_t oi = field.origin_index;
  const std::int32_t dir = field.direction == Direction::Forward ? 0 : 1;
  const std::int32_t np = field.domain.n_points;
  const std::int32_t ns = field.n_steps;
  put(&oi, 4);
  put(&dir, 4);
  put(&np, 4);
  put(&ns, 4);
  put(&field.origin_u, 8);
  put(&field.dt, 8);
  put(&field.domain.circumference, 8);
  put(field.values.data(), field.values.size() * 8);
  put(field.reached.data(), field.reached.size());
}

inline ActionField read_field_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::string(magic, 8) != "WKAMFLD1")
    throw IoError("bad field file magic: " + path);
  auto get = [&](void* p, std::size_t n) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!in) throw IoError("truncated field file: " + path);
  };
  std::int32_t oi, dir, np, ns;
  double u0, dt, circ;
  get(&oi, 4);
  get(&dir, 4);
  get(&np, 4);
  get(&ns, 4);
  get(&u0, 8);
  get(&dt, 8);
  get(&circ, 8);
  ActionField f;
  f.domain = CircleDomain(circ, np);
  f.origin_index = oi;
  f.origin_u = u0;
  f.direction = dir == 0 ? Direction::Forward : Direction::Backward;
  f.dt = dt;
  f.n_steps = ns;
  const std::size_t cells = static_cast<std::size_t>(np) * (static_cast<std::size_t>(ns) + 1);
  f.values.resize(cells);
  f.reached.resize(cells);
  get(f.values.data(), cells * 8);
  get(f.reached.data(), cells);
  f.pointers.assign(cells, -1);  // pointers/feet are not persisted
  f.feet.assign(cells, std::numeric_limits<double>::quiet_NaN());
  return f;
}

}  // namespace wkam

#endif
