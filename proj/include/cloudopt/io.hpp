// File emission and parsing: parameter JSON, run reports, trace and table
// CSVs. Numbers are written as decimals with 9 significant digits and files
// end lines with LF, so identical runs produce byte-identical artifacts.
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cloudopt/config.hpp"
#include "cloudopt/plant.hpp"
#include "cloudopt/report.hpp"

namespace cloudopt {

inline std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

namespace detail {

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot write file: " + path);
  out << content;
}

inline std::string cloud_json(const CloudDescriptor& c) {
  return "{\"ex\": " + fmt9(c.ex) + ", \"en\": " + fmt9(c.en) + ", \"he\": " + fmt9(c.he) + "}";
}

}  // namespace detail

inline std::string params_to_json(const ParameterVector& p) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"structure\": {\"m1\": " << p.structure.m1 << ", \"m2\": " << p.structure.m2
      << ", \"o\": " << p.structure.o << ", \"pu\": " << fmt9(p.structure.pu) << "},\n";
  out << "  \"in1_clouds\": [";
  for (std::size_t i = 0; i < p.in1_clouds.size(); ++i)
    out << (i ? ", " : "") << detail::cloud_json(p.in1_clouds[i]);
  out << "],\n  \"in2_clouds\": [";
  for (std::size_t i = 0; i < p.in2_clouds.size(); ++i)
    out << (i ? ", " : "") << detail::cloud_json(p.in2_clouds[i]);
  out << "],\n  \"out_singletons\": [";
  for (std::size_t i = 0; i < p.out_singletons.size(); ++i)
    out << (i ? ", " : "") << fmt9(p.out_singletons[i]);
  out << "],\n  \"rules\": [";
  for (std::size_t i = 0; i < p.rules.entries.size(); ++i)
    out << (i ? ", " : "") << p.rules.entries[i];
  out << "],\n  \"ku\": " << fmt9(p.ku) << "\n}\n";
  return out.str();
}

inline void write_params_json(const std::string& path, const ParameterVector& p) {
  detail::write_file(path, params_to_json(p));
}

inline ParameterVector params_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("params JSON parse error: ") + e.what());
  }
  ParameterVector p;
  try {
    const auto& s = j.at("structure");
    p.structure.m1 = s.at("m1").get<int>();
    p.structure.m2 = s.at("m2").get<int>();
    p.structure.o = s.at("o").get<int>();
    p.structure.pu = s.at("pu").get<double>();
    for (const auto& c : j.at("in1_clouds"))
      p.in1_clouds.push_back(
          {c.at("ex").get<double>(), c.at("en").get<double>(), c.at("he").get<double>()});
    for (const auto& c : j.at("in2_clouds"))
      p.in2_clouds.push_back(
          {c.at("ex").get<double>(), c.at("en").get<double>(), c.at("he").get<double>()});
    p.out_singletons = j.at("out_singletons").get<std::vector<double>>();
    p.rules.entries = j.at("rules").get<std::vector<int>>();
    p.ku = j.at("ku").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("params JSON schema error: ") + e.what());
  }
  try {
    validate(p);
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("invalid params: ") + e.what());
  }
  return p;
}

inline ParameterVector read_params_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open params file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return params_from_json(buf.str());
}

inline std::string evals_field(const OptimizerReport& r, bool json) {
  if (r.evals_to_threshold) return std::to_string(*r.evals_to_threshold);
  return json ? "\"budget-exhausted\"" : "budget-exhausted";
}

inline void write_report_json(const std::string& path, const OptimizerReport& r) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"method\": \"" << r.method << "\",\n";
  out << "  \"seed\": " << r.seed << ",\n";
  out << "  \"evals_to_threshold\": " << evals_field(r, true) << ",\n";
  out << "  \"best_cost\": " << fmt9(r.best_cost) << ",\n";
  out << "  \"chaos_evals\": " << r.chaos_evals << ",\n";
  out << "  \"cg_evals\": " << r.cg_evals << "\n";
  out << "}\n";
  detail::write_file(path, out.str());
}

inline void write_trace_csv(const std::string& path, const EpisodeTrace& trace) {
  std::ostringstream out;
  out << "k,r,y,u,e\n";
  for (const TraceRow& row : trace.rows)
    out << row.k << ',' << fmt9(row.r) << ',' << fmt9(row.y) << ',' << fmt9(row.u) << ','
        << fmt9(row.e) << '\n';
  detail::write_file(path, out.str());
}

inline void write_table_csv(const std::string& path, const std::vector<OptimizerReport>& rows) {
  std::ostringstream out;
  out << "method,seed,evals_to_threshold,best_cost\n";
  for (const OptimizerReport& r : rows)
    out << r.method << ',' << r.seed << ',' << evals_field(r, false) << ',' << fmt9(r.best_cost)
        << '\n';
  detail::write_file(path, out.str());
}

inline void write_summary_csv(const std::string& path, const std::vector<MethodSummary>& rows) {
  std::ostringstream out;
  out << "method,median_evals,success_rate\n";
  for (const MethodSummary& s : rows) {
    out << s.method << ',';
    if (s.median_evals)
      out << *s.median_evals;
    else
      out << "budget-exhausted";
    out << ',' << fmt9(s.success_rate) << '\n';
  }
  detail::write_file(path, out.str());
}

}  // namespace cloudopt
