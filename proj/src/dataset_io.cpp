#include "ddlqr/dataset_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "ddlqr/error.hpp"
#include "json.hpp"

namespace ddlqr::io {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InvalidInput("not a number: '" + std::string(s) + "'");
  }
  return v;
}

std::string_view to_string(NoiseKind k) {
  switch (k) {
    case NoiseKind::gaussian_iid: return "gaussian_iid";
    case NoiseKind::uniform_iid: return "uniform_iid";
    case NoiseKind::zero: return "zero";
  }
  return "zero";
}

NoiseKind parse_noise_kind(std::string_view s) {
  if (s == "gaussian_iid" || s == "gaussian") return NoiseKind::gaussian_iid;
  if (s == "uniform_iid" || s == "uniform") return NoiseKind::uniform_iid;
  if (s == "zero" || s == "none") return NoiseKind::zero;
  throw InvalidInput("unknown noise kind '" + std::string(s) + "'");
}

namespace {

void append_block(std::string& out, std::string_view name, const Matrix& m) {
  out += name;
  out += '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
}

Matrix to_matrix(const std::vector<std::vector<double>>& rows, std::string_view name) {
  if (rows.empty()) throw InvalidInput("dataset csv: block '" + std::string(name) + "' is empty");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) {
      throw InvalidInput("dataset csv: ragged rows in block '" + std::string(name) + "'");
    }
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

json spec_json(const NoiseSpec& s) {
  return json{{"kind", to_string(s.kind)}, {"scale", s.scale}, {"seed", s.seed}};
}

NoiseSpec spec_from_json(const json& j) {
  NoiseSpec s;
  s.kind = parse_noise_kind(j.at("kind").get<std::string>());
  s.scale = j.at("scale").get<double>();
  s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string dataset_to_csv(const Dataset& ds) {
  ds.validate();
  std::string out;
  append_block(out, "u0", ds.U0);
  append_block(out, "x0", ds.X0);
  append_block(out, "x1", ds.X1);
  if (ds.D0) append_block(out, "d0", *ds.D0);
  return out;
}

Dataset dataset_from_csv(std::string_view text) {
  std::vector<std::pair<std::string, std::vector<std::vector<double>>>> blocks;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line == "u0" || line == "x0" || line == "x1" || line == "d0") {
      for (const auto& b : blocks) {
        if (b.first == line) throw InvalidInput("dataset csv: duplicate block '" + std::string(line) + "'");
      }
      blocks.emplace_back(std::string(line), std::vector<std::vector<double>>{});
      continue;
    }
    if (blocks.empty()) {
      throw InvalidInput("dataset csv line " + std::to_string(line_no) + ": data before any block header");
    }
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string_view field =
          line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      try {
        row.push_back(parse_double(field));
      } catch (const InvalidInput& e) {
        throw InvalidInput("dataset csv line " + std::to_string(line_no) + ": " + e.what());
      }
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    blocks.back().second.push_back(std::move(row));
  }

  Dataset ds;
  bool have_u = false, have_x0 = false, have_x1 = false;
  for (const auto& [name, rows] : blocks) {
    Matrix m = to_matrix(rows, name);
    if (name == "u0") { ds.U0 = std::move(m); have_u = true; }
    else if (name == "x0") { ds.X0 = std::move(m); have_x0 = true; }
    else if (name == "x1") { ds.X1 = std::move(m); have_x1 = true; }
    else { ds.D0 = std::move(m); }
  }
  if (!have_u || !have_x0 || !have_x1) {
    throw InvalidInput("dataset csv: blocks u0, x0 and x1 are required");
  }
  ds.validate();
  return ds;
}

std::string dataset_sidecar(const Dataset& ds) {
  json j{{"n", ds.n()}, {"m", ds.m()}, {"T", ds.T()}, {"has_d0", ds.D0.has_value()}};
  if (ds.origin) {
    j["seed"] = ds.origin->seed;
    j["input"] = spec_json(ds.origin->input);
    j["noise"] = spec_json(ds.origin->noise);
  }
  return j.dump(2) + "\n";
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  std::filesystem::path p = csv_path;
  p.replace_extension(".json");
  return p;
}

void write_dataset(const Dataset& ds, const std::filesystem::path& csv_path) {
  if (csv_path.has_parent_path()) std::filesystem::create_directories(csv_path.parent_path());
  {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write " + csv_path.string());
    out << dataset_to_csv(ds);
  }
  std::ofstream side(sidecar_path(csv_path), std::ios::binary);
  if (!side) throw InvalidInput("cannot write " + sidecar_path(csv_path).string());
  side << dataset_sidecar(ds);
}

Dataset read_dataset(const std::filesystem::path& csv_path) {
  Dataset ds = dataset_from_csv(read_file(csv_path));
  const auto side = sidecar_path(csv_path);
  if (!std::filesystem::exists(side)) return ds;

  json j;
  try {
    j = json::parse(read_file(side));
    if (j.at("n").get<Eigen::Index>() != ds.n() || j.at("m").get<Eigen::Index>() != ds.m() ||
        j.at("T").get<Eigen::Index>() != ds.T()) {
      throw InvalidInput("dataset sidecar dimensions disagree with the csv");
    }
    if (j.contains("seed")) {
      ds.origin = DatasetOrigin{j.at("seed").get<std::uint64_t>(), spec_from_json(j.at("input")),
                                spec_from_json(j.at("noise"))};
    }
  } catch (const json::exception& e) {
    throw InvalidInput("malformed dataset sidecar " + side.string() + ": " + e.what());
  }
  return ds;
}

}  // namespace ddlqr::io
