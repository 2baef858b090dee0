#include "dlse/io.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "dlse/errors.hpp"

namespace dlse {

using nlohmann::json;

namespace {

json component_to_json(const LseParams& p) {
  json alphas = json::array();
  for (Eigen::Index k = 0; k < p.terms(); ++k) {
    json row = json::array();
    for (Eigen::Index j = 0; j < p.dim(); ++j) row.push_back(p.alphas(k, j));
    alphas.push_back(std::move(row));
  }
  json betas = json::array();
  for (Eigen::Index k = 0; k < p.terms(); ++k) betas.push_back(p.betas(k));
  return json{{"K", p.terms()}, {"alphas", std::move(alphas)},
              {"betas", std::move(betas)}};
}

LseParams component_from_json(const json& j, double temperature,
                              Eigen::Index dim) {
  LseParams p;
  p.temperature = temperature;
  const auto& alphas = j.at("alphas");
  const auto terms = static_cast<Eigen::Index>(j.at("K").get<int>());
  if (static_cast<Eigen::Index>(alphas.size()) != terms) {
    throw data_error("model: K does not match the alphas row count");
  }
  p.alphas.resize(terms, dim);
  for (Eigen::Index k = 0; k < terms; ++k) {
    const auto& row = alphas.at(static_cast<std::size_t>(k));
    if (static_cast<Eigen::Index>(row.size()) != dim) {
      throw data_error("model: alphas row has wrong length");
    }
    for (Eigen::Index c = 0; c < dim; ++c) {
      p.alphas(k, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
  }
  const auto& betas = j.at("betas");
  if (static_cast<Eigen::Index>(betas.size()) != terms) {
    throw data_error("model: betas length does not match K");
  }
  p.betas.resize(terms);
  for (Eigen::Index k = 0; k < terms; ++k) {
    p.betas(k) = betas.at(static_cast<std::size_t>(k)).get<double>();
  }
  return p;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, const std::string& where) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last) {
    throw data_error(where + ": cannot parse '" + std::string(text) +
                     "' as a number");
  }
  return v;
}

}  // namespace

json model_to_json(const DlseModel& m) {
  validate(m);
  return json{{"schema_version", 1},
              {"n", m.dim()},
              {"T", m.plus.temperature},
              {"plus", component_to_json(m.plus)},
              {"minus", component_to_json(m.minus)}};
}

DlseModel model_from_json(const json& j) {
  try {
    if (j.at("schema_version").get<int>() != 1) {
      throw data_error("model: unsupported schema_version");
    }
    const auto dim = static_cast<Eigen::Index>(j.at("n").get<int>());
    const double temperature = j.at("T").get<double>();
    DlseModel m;
    m.plus = component_from_json(j.at("plus"), temperature, dim);
    m.minus = component_from_json(j.at("minus"), temperature, dim);
    validate(m);
    return m;
  } catch (const json::exception& e) {
    throw data_error(std::string("model: malformed JSON document: ") + e.what());
  }
}

void write_model(const DlseModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot open '" + path + "' for writing");
  out << model_to_json(m).dump(2) << '\n';
  if (!out) throw data_error("failed writing '" + path + "'");
}

DlseModel read_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw data_error(path + ": " + e.what());
  }
  return model_from_json(j);
}

void write_dataset_csv(const Dataset& d, const std::string& path) {
  validate(d);
  std::ofstream out(path);
  if (!out) throw data_error("cannot open '" + path + "' for writing");
  for (Eigen::Index j = 0; j < d.dim(); ++j) out << 'x' << (j + 1) << ',';
  out << "y\n";
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    for (Eigen::Index j = 0; j < d.dim(); ++j) {
      out << format_double(d.points(i, j)) << ',';
    }
    out << format_double(d.targets(i)) << '\n';
  }
  if (!out) throw data_error("failed writing '" + path + "'");
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

Table read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw data_error(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  Table t;
  t.header = split_line(line);
  const std::size_t cols = t.header.size();
  if (cols == 0) throw data_error(path + ": empty header");

  std::vector<double> cells;
  std::size_t rows = 0;
  for (std::size_t line_no = 2; std::getline(in, line); ++line_no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> row = split_line(line);
    if (row.size() != cols) {
      throw data_error(path + ": line " + std::to_string(line_no) +
                       ": expected " + std::to_string(cols) + " fields, got " +
                       std::to_string(row.size()));
    }
    for (const std::string& cell : row) {
      cells.push_back(
          parse_double(cell, path + ": line " + std::to_string(line_no)));
    }
    ++rows;
  }
  t.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      t.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          cells[i * cols + j];
    }
  }
  return t;
}

Dataset read_dataset_csv(const std::string& path) {
  const Table t = read_csv(path);
  if (t.header.size() < 2 || t.header.back() != "y") {
    throw data_error(path + ": expected header x1,..,xn,y");
  }
  if (t.values.rows() < 1) throw data_error(path + ": no data rows");
  Dataset d;
  d.points = t.values.leftCols(t.values.cols() - 1);
  d.targets = t.values.rightCols(1);
  validate(d);
  return d;
}

void write_trace_csv(const DcaTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot open '" + path + "' for writing");
  out << "iteration,objective,step_norm,inner_iters\n";
  for (std::size_t i = 0; i < trace.objectives.size(); ++i) {
    const double step =
        i == 0 ? 0.0 : (trace.iterates[i] - trace.iterates[i - 1]).norm();
    const int inner = i == 0 ? 0 : trace.inner_iterations[i - 1];
    out << i << ',' << format_double(trace.objectives[i]) << ','
        << format_double(step) << ',' << inner << '\n';
  }
  if (!out) throw data_error("failed writing '" + path + "'");
}

json trace_to_json(const DcaTrace& trace) {
  json iterates = json::array();
  for (const Eigen::VectorXd& x : trace.iterates) {
    json row = json::array();
    for (Eigen::Index i = 0; i < x.size(); ++i) row.push_back(x(i));
    iterates.push_back(std::move(row));
  }
  return json{{"iterates", std::move(iterates)},
              {"objectives", trace.objectives},
              {"inner_iterations", trace.inner_iterations},
              {"outer_iterations", trace.outer_iterations},
              {"termination", trace.termination}};
}

json pwa_to_json(const PwaSpec& s) {
  validate(s);
  return json{{"a", s.slope},
              {"b", s.intercept},
              {"breakpoints", s.breakpoints},
              {"jumps", s.jumps}};
}

PwaSpec pwa_from_json(const json& j) {
  try {
    PwaSpec s;
    s.slope = j.at("a").get<double>();
    s.intercept = j.at("b").get<double>();
    s.breakpoints = j.at("breakpoints").get<std::vector<double>>();
    s.jumps = j.at("jumps").get<std::vector<double>>();
    validate(s);
    return s;
  } catch (const json::exception& e) {
    throw data_error(std::string("pwa: malformed JSON document: ") + e.what());
  }
}

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("DLSE_LOG");
    if (env == nullptr) return LogLevel::quiet;
    const std::string value(env);
    if (value == "debug") return LogLevel::debug;
    if (value == "info") return LogLevel::info;
    return LogLevel::quiet;
  }();
  return level;
}

void log_info(const std::string& message) {
  if (log_level() >= LogLevel::info) std::cerr << "[dlse] " << message << '\n';
}

void log_debug(const std::string& message) {
  if (log_level() >= LogLevel::debug) std::cerr << "[dlse] " << message << '\n';
}

}  // namespace dlse
