// Copyright the rbm authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "rbm/error.hpp"
#include "rbm/harness.hpp"

namespace rbm::harness
{

namespace
{

std::string format_full(double v)
{
  if (std::isnan(v))
    return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string &line, char sep)
{
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep))
    out.push_back(field);
  if (!line.empty() && line.back() == sep)
    out.emplace_back();
  return out;
}

double parse_number(const std::string &s)
{
  if (s == "nan")
    return std::nan("");
  char *end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw InvalidArgument("report: malformed number '" + s + "'");
  return v;
}

}  // namespace

std::string format_number(double v)
{
  if (std::isnan(v))
    return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string render_report(const std::vector<ResultRow> &rows)
{
  std::string out = kReportHeader;
  out += '\n';
  for (const auto &row : rows) {
    if (row.method.find_first_of(",\n\"") != std::string::npos)
      throw InvalidArgument("report: method label '" + row.method + "' contains a separator");
    out += row.method;
    for (double v : {row.n_train, row.eps_t_max, row.r_pod, row.r_ei, row.iterations, row.offline_s, row.speedup}) {
      out += ',';
      out += format_number(v);
    }
    out += '\n';
  }
  return out;
}

void emit_report(const std::vector<ResultRow> &rows, const std::filesystem::path &path)
{
  atomic_write(path, render_report(rows));
}

std::vector<ResultRow> parse_report(const std::string &text)
{
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kReportHeader)
    throw InvalidArgument("report: missing or unexpected header");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    const auto f = split(line, ',');
    if (f.size() != 8)
      throw InvalidArgument("report: expected 8 fields, got " + std::to_string(f.size()));
    ResultRow r;
    r.method = f[0];
    r.n_train = parse_number(f[1]);
    r.eps_t_max = parse_number(f[2]);
    r.r_pod = parse_number(f[3]);
    r.r_ei = parse_number(f[4]);
    r.iterations = parse_number(f[5]);
    r.offline_s = parse_number(f[6]);
    r.speedup = parse_number(f[7]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string render_trace(const greedy::GreedyTrace &trace)
{
  std::string out =
      "iteration,stage,fine_index,mu,estimate,true_error,r_pod,added,r,r_ei,max_estimate,orthonormality,forced,wall_s\n";
  for (const auto &rec : trace.records) {
    std::string mu;
    for (std::size_t i = 0; i < rec.mu.size(); ++i) {
      if (i)
        mu += ';';
      mu += format_full(rec.mu[i]);
    }
    out += std::to_string(rec.iteration) + ',' + std::to_string(rec.stage) + ',' + std::to_string(rec.fine_index) + ',' +
           mu + ',' + format_full(rec.estimate) + ',' + format_full(rec.true_error) + ',' + std::to_string(rec.r_pod) +
           ',' + std::to_string(rec.added) + ',' + std::to_string(rec.r) + ',' + std::to_string(rec.r_ei) + ',' +
           format_full(rec.max_estimate) + ',' + format_full(rec.orthonormality) + ',' + (rec.forced ? "1" : "0") +
           ',' + format_number(rec.wall_s) + '\n';
  }
  return out;
}

}  // namespace rbm::harness
