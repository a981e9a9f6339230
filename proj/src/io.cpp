#include "thermolab/io.hpp"

#include <array>
#include <cstdio>
#include <charconv>
#include <fstream>
#include <sstream>

#include <boost/crc.hpp>

#include "thermolab/error.hpp"

namespace thermolab::io {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string parse_message(std::size_t line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

}  // namespace

std::string format_double(double x) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw Error(ErrorKind::parse_error, "missing column '" + name + "'");
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += ',';
    out += table.header[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (!have_header) {
      table.header = split(line);
      for (const auto& h : table.header)
        if (h.empty()) throw Error(ErrorKind::parse_error, parse_message(line_no, "empty column name"));
      have_header = true;
      continue;
    }
    const auto fields = split(line);
    if (fields.size() != table.header.size())
      throw Error(ErrorKind::parse_error,
                  parse_message(line_no, "expected " + std::to_string(table.header.size()) +
                                             " fields, found " + std::to_string(fields.size())));
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) {
      double v = 0.0;
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size())
        throw Error(ErrorKind::parse_error, parse_message(line_no, "not a number: '" + f + "'"));
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  if (!have_header) throw Error(ErrorKind::parse_error, "empty CSV input");
  return table;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_error, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_text(path)); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io_error, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::io_error, "write failed for " + path.string());
}

CsvTable trajectory_table(const micro::Trajectory& traj, int n_particles, int dim) {
  CsvTable t;
  t.header.push_back("t");
  for (const char* name : {"p", "u"})
    for (int k = 0; k < n_particles; ++k)
      for (int i = 0; i < dim; ++i)
        t.header.push_back(std::string(name) + "_" + std::to_string(k) + "_" + std::to_string(i));
  const int m = n_particles * dim;
  for (int j = 0; j < m; ++j) t.header.push_back("phi_" + std::to_string(j));
  for (std::size_t r = 0; r < traj.times.size(); ++r) {
    std::vector<double> row;
    row.reserve(1 + 3 * m);
    row.push_back(traj.times[r]);
    row.insert(row.end(), traj.p[r].data(), traj.p[r].data() + m);
    row.insert(row.end(), traj.u[r].data(), traj.u[r].data() + m);
    const Vec phi = traj.driver.value(traj.times[r]);
    row.insert(row.end(), phi.data(), phi.data() + m);
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable driver_table(const PiecewiseLinearPath& driver) {
  CsvTable t;
  t.header.push_back("t");
  for (int j = 0; j < driver.dim(); ++j) t.header.push_back("phi_" + std::to_string(j));
  for (std::size_t i = 0; i < driver.knot_count(); ++i) {
    std::vector<double> row{driver.knots()[i]};
    const auto v = driver.value_at_knot(i);
    row.insert(row.end(), v.data(), v.data() + v.size());
    t.rows.push_back(std::move(row));
  }
  return t;
}

PiecewiseLinearPath path_from_table(const CsvTable& table, const std::string& prefix) {
  const std::size_t tcol = table.column("t");
  std::vector<std::size_t> cols;
  for (std::size_t i = 0; i < table.header.size(); ++i)
    if (table.header[i].rfind(prefix, 0) == 0) cols.push_back(i);
  require(!cols.empty(), ErrorKind::parse_error, "no '" + prefix + "*' columns in input");
  require(table.rows.size() >= 2, ErrorKind::insufficient_data, "path needs at least two rows");
  const int dim = static_cast<int>(cols.size());
  auto value = [&](std::size_t r) {
    Vec v(dim);
    for (int j = 0; j < dim; ++j) v[j] = table.rows[r][cols[j]];
    return v;
  };
  PiecewiseLinearPath path(dim, table.rows[0][tcol], value(0));
  for (std::size_t r = 1; r < table.rows.size(); ++r) {
    const double t0 = table.rows[r - 1][tcol];
    const double t1 = table.rows[r][tcol];
    if (!(t1 > t0))
      throw Error(ErrorKind::parse_error,
                  "line " + std::to_string(r + 2) + ": times must be strictly increasing");
    path.append(t1, (value(r) - value(r - 1)) / (t1 - t0));
  }
  return path;
}

CsvTable lift_table(const rough::RoughPathGrid& lift) {
  CsvTable t;
  const int d = lift.dim();
  t.header.push_back("t");
  for (int j = 0; j < d; ++j) t.header.push_back("x_" + std::to_string(j));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) t.header.push_back("xx_" + std::to_string(i) + "_" + std::to_string(j));
  for (std::size_t r = 0; r < lift.size(); ++r) {
    std::vector<double> row{lift.times()[r]};
    const auto x = lift.anchored_level1(r);
    row.insert(row.end(), x.data(), x.data() + d);
    const auto xx = lift.anchored_level2(r);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) row.push_back(xx(i, j));
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable path_sample_table(const sde::PathSample& sample) {
  CsvTable t;
  t.header.push_back("t");
  for (int j = 0; j < sample.dim; ++j) t.header.push_back("x_" + std::to_string(j));
  for (std::size_t r = 0; r < sample.size(); ++r) {
    std::vector<double> row{sample.times[r]};
    const auto v = sample.at(r);
    row.insert(row.end(), v.data(), v.data() + sample.dim);
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable path_ensemble_table(const std::vector<sde::PathSample>& samples) {
  CsvTable t;
  if (samples.empty()) return t;
  t.header.push_back("path");
  const auto one = path_sample_table(samples.front());
  t.header.insert(t.header.end(), one.header.begin(), one.header.end());
  for (std::size_t p = 0; p < samples.size(); ++p) {
    for (auto& row : path_sample_table(samples[p]).rows) {
      row.insert(row.begin(), static_cast<double>(p));
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

std::uint32_t crc32(const std::string& bytes) {
  boost::crc_32_type crc;
  crc.process_bytes(bytes.data(), bytes.size());
  return crc.checksum();
}

json to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const micro::ModelParams& p) {
  json j{{"n_particles", p.n_particles},     {"dim", p.dim},
         {"collision_rate", p.collision_rate}, {"field_strength", p.field_strength},
         {"total_energy", p.total_energy},   {"t_final", p.t_final},
         {"ode_step", p.ode_step},           {"grid_points", p.grid_points}};
  const Vec n = p.unit_field();
  j["field_direction"] = std::vector<double>(n.data(), n.data() + n.size());
  return j;
}

json to_json(const sde::SdeConfig& c) {
  const Vec x0 = c.initial_state();
  return json{{"model", sde::to_string(c.model)},
              {"n_particles", c.n_particles},
              {"dim", c.dim},
              {"collision_rate", c.collision_rate},
              {"total_energy", c.total_energy},
              {"step", c.effective_step()},
              {"t_final", c.t_final},
              {"delta", c.delta()},
              {"variance_rate", c.variance_rate()},
              {"initial", std::vector<double>(x0.data(), x0.data() + x0.size())}};
}

json to_json(const rough::HolderReport& r) {
  return json{{"alpha", r.alpha},
              {"seminorm_level1", r.seminorm_level1},
              {"seminorm_level2", r.seminorm_level2},
              {"norm", r.norm},
              {"grid_points", r.grid_points},
              {"pairs_evaluated", r.pairs_evaluated},
              {"exhaustive", r.exhaustive}};
}

json to_json(const rough::SpiralReport& r) {
  return json{{"epsilon", r.epsilon},
              {"segments", r.segments},
              {"sup_norm", r.sup_norm},
              {"area_term", r.area_term},
              {"area_term_exact", r.area_term_exact},
              {"antisymmetric", r.antisymmetric},
              {"antisymmetric_exact", r.antisymmetric_exact}};
}

json to_json(const stats::CorrelationEstimate& e) {
  return json{{"formula", e.formula_id},
              {"lag", e.lag},
              {"samples", e.sample_count},
              {"estimate", to_json(e.estimate)},
              {"std_error", to_json(e.std_error)},
              {"target", to_json(e.target)},
              {"low_power", e.low_power}};
}

json to_json(const stats::KsResult& ks) {
  return json{{"statistic", ks.statistic}, {"critical_05", ks.critical_05},
              {"critical_01", ks.critical_01}, {"p_value", ks.p_value},
              {"n", ks.n},                   {"m", ks.m}};
}

json to_json(const stats::MomentBoundFit& f) {
  return json{{"q", f.q},         {"level", f.level},         {"norm_order", f.norm_order},
              {"gaps", f.gaps},   {"norms", f.norms},         {"samples", f.samples},
              {"slope", f.slope}, {"intercept", f.intercept}, {"slope_se", f.slope_se}};
}

json RunManifest::to_json() const {
  json files = json::array();
  for (const auto& p : outputs) {
    char hex[9];
    std::snprintf(hex, sizeof hex, "%08x", crc32(read_text(p)));
    files.push_back(json{{"path", p.filename().string()}, {"crc32", hex}});
  }
  return json{{"command", command},
              {"version", kVersion},
              {"seed", seed},
              {"threads", threads},
              {"wall_clock_seconds", wall_clock_seconds},
              {"config", config},
              {"outputs", files}};
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
  write_text(path, manifest.to_json().dump(2) + "\n");
}

}  // namespace thermolab::io
