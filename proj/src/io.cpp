#include "paro/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace paro {

namespace {

double number_from_token(const std::string& tok) {
  if (tok == "inf" || tok == "+inf") return std::numeric_limits<double>::infinity();
  if (tok == "-inf") return -std::numeric_limits<double>::infinity();
  if (tok == "nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  const double v = std::stod(tok, &used);
  if (used != tok.size()) throw std::invalid_argument("io: bad numeric token '" + tok + "'");
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

double slope_from_json(const nlohmann::json& j) {
  if (j.is_string()) return number_from_token(j.get<std::string>());
  return j.get<double>();
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("io: cannot open " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("io: write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string join_csv_row(const std::vector<std::string>& cells) {
  std::string row;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) row.push_back(',');
    row += cells[i];
  }
  row.push_back('\n');
  return row;
}

void write_trace_csv(const IterateTrace& trace, const std::string& path) {
  std::string body = "iter,F,f,psi,eta,step_norm,qrate,crit_residual\n";
  for (const TraceRow& r : trace.rows) {
    body += join_csv_row({std::to_string(r.iter), format_number(r.F), format_number(r.f),
                          format_number(r.psi), format_number(r.eta), format_number(r.step_norm),
                          format_number(r.qrate), r.has_crit ? format_number(r.crit_residual) : ""});
  }
  write_text_atomic(path, body);
}

nlohmann::json par_to_json(const ParSpec& par) {
  nlohmann::json j;
  j["family"] = family_name(par.family());
  switch (par.family()) {
    case ParFamily::quasiconvex_uniform:
      j["gap"] = par.gap();
      break;
    case ParFamily::nonconvex_nearest:
      j["levels"] = par.levels();
      break;
    default: {
      j["levels"] = par.levels();
      nlohmann::json slopes = nlohmann::json::array();
      for (double a : par.slopes()) {
        if (std::isinf(a)) {
          slopes.push_back("inf");
        } else {
          slopes.push_back(a);
        }
      }
      j["slopes"] = slopes;
      break;
    }
  }
  return j;
}

ParSpec par_from_json(const nlohmann::json& j) {
  const std::string fam = j.at("family").get<std::string>();
  if (fam == family_name(ParFamily::quasiconvex_uniform)) {
    return ParSpec::quasiconvex_uniform(j.at("gap").get<double>());
  }
  std::vector<double> levels = j.at("levels").get<std::vector<double>>();
  if (fam == family_name(ParFamily::nonconvex_nearest)) {
    return ParSpec::nonconvex_nearest(levels);
  }
  std::vector<double> slopes;
  for (const auto& s : j.at("slopes")) slopes.push_back(slope_from_json(s));
  if (fam == family_name(ParFamily::convex)) return ParSpec::convex(levels, slopes);
  if (fam == family_name(ParFamily::general)) return ParSpec::general(levels, slopes);
  throw std::invalid_argument("io: unknown penalty family '" + fam + "'");
}

void save_dataset_csv(const RegressionDataset& dataset, const std::string& path) {
  const Eigen::Index n = dataset.A.rows();
  const Eigen::Index d = dataset.A.cols();
  std::string body;
  for (Eigen::Index jcol = 0; jcol < d; ++jcol) body += "f" + std::to_string(jcol) + ",";
  body += "response\n";
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<std::string> cells;
    cells.reserve(static_cast<std::size_t>(d) + 1);
    for (Eigen::Index jcol = 0; jcol < d; ++jcol) cells.push_back(format_number(dataset.A(i, jcol)));
    cells.push_back(format_number(dataset.b(i)));
    body += join_csv_row(cells);
  }
  write_text_atomic(path, body);

  nlohmann::json meta;
  meta["n"] = dataset.spec.n;
  meta["d"] = dataset.spec.d;
  meta["task"] = task_name(dataset.spec.task);
  meta["noise_sigma"] = dataset.spec.noise_sigma;
  meta["truth"] = dataset.spec.truth == TruthKind::sparse ? "sparse" : "dense-gaussian";
  meta["sparsity"] = dataset.spec.sparsity;
  meta["seed"] = dataset.spec.seed;
  meta["x_star"] = std::vector<double>(dataset.x_star.data(), dataset.x_star.data() + dataset.x_star.size());
  write_text_atomic(path + ".meta.json", meta.dump(2) + "\n");
}

RegressionDataset load_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("io: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (first) {
      first = false;
      width = cells.size();
      // Tolerate a header line; detect it by a non-numeric first cell.
      try {
        number_from_token(cells[0]);
      } catch (const std::exception&) {
        continue;
      }
    }
    if (cells.size() != width) throw std::runtime_error("io: ragged CSV in " + path);
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(number_from_token(c));
    rows.push_back(std::move(row));
  }
  if (rows.empty() || width < 2) throw std::runtime_error("io: empty dataset in " + path);

  RegressionDataset ds;
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index d = static_cast<Eigen::Index>(width - 1);
  ds.A.resize(n, d);
  ds.b.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index jcol = 0; jcol < d; ++jcol) ds.A(i, jcol) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(jcol)];
    ds.b(i) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)];
  }

  ds.spec.n = static_cast<int>(n);
  ds.spec.d = static_cast<int>(d);
  ds.spec.task = TaskKind::linear;
  ds.x_star = Eigen::VectorXd::Zero(d);
  const std::string meta_path = path + ".meta.json";
  std::ifstream meta_in(meta_path);
  const bool have_meta = static_cast<bool>(meta_in);
  if (meta_in) {
    nlohmann::json meta = nlohmann::json::parse(meta_in);
    ds.spec.task = task_from_name(meta.value("task", "linear"));
    ds.spec.noise_sigma = meta.value("noise_sigma", 0.0);
    ds.spec.truth = meta.value("truth", std::string("dense-gaussian")) == "sparse" ? TruthKind::sparse
                                                                                   : TruthKind::dense_gaussian;
    ds.spec.sparsity = meta.value("sparsity", 0);
    ds.spec.seed = meta.value("seed", std::uint64_t{0});
    if (meta.contains("x_star")) {
      const auto xs = meta["x_star"].get<std::vector<double>>();
      if (static_cast<Eigen::Index>(xs.size()) == d) {
        for (Eigen::Index jcol = 0; jcol < d; ++jcol) ds.x_star(jcol) = xs[static_cast<std::size_t>(jcol)];
      }
    }
  }
  // Binary labels mark a logistic task when no sidecar says otherwise.
  if (!have_meta && ds.spec.task == TaskKind::linear) {
    bool binary = true;
    for (Eigen::Index i = 0; i < n && binary; ++i) binary = (ds.b(i) == 1.0 || ds.b(i) == -1.0);
    if (binary && n > 0) ds.spec.task = TaskKind::logistic;
  }
  return ds;
}

}  // namespace paro
