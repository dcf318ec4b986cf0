// Copyright 2020 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//
//  Instance files.
//
//      #reward_kind=negative_distance
//      #reward_offset=2
//      role,id,threshold,v0,v1,rho,demand,variance
//      provider,0,2,0.5,1,,,
//      user,0,,0.25,0.75,1,1,0
//
//  Lines starting with '#' carry key=value settings and must precede the
//  header. Known keys: reward_kind (dot | negative_distance), reward_offset,
//  reward_floor, horizon, slate_size, utility (linear | sigmoid), alpha
//  (';'-separated), beta, scale. Without settings the reward is the plain
//  dot product with one slot. The rho, demand and variance columns are
//  optional and default to 1, 1, 0. Ids count from 0 within each role, in
//  file order.
//

#ifndef ECOMATCH_INSTANCE_IO_H_
#define ECOMATCH_INSTANCE_IO_H_

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ecomatch/model.h"

namespace ecomatch {

inline std::string FormatExact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void SaveInstance(const Instance& instance, std::ostream& out) {
  ValidateInstance(instance);
  if (!instance.query_weight.empty() || !instance.engagement_weight.empty())
    throw InputError("save: weight tables have no file representation");
  out << "#reward_kind="
      << (instance.reward_kind == RewardKind::kDotProduct ? "dot" : "negative_distance")
      << "\n";
  out << "#reward_offset=" << FormatExact(instance.reward_offset) << "\n";
  if (instance.reward_floor)
    out << "#reward_floor=" << FormatExact(*instance.reward_floor) << "\n";
  out << "#horizon=" << instance.horizon << "\n";
  out << "#slate_size=" << instance.slate_size << "\n";
  if (const auto* lin = std::get_if<LinearUtility>(&instance.utility)) {
    out << "#utility=linear\n#alpha=";
    for (std::size_t t = 0; t < lin->alpha.size(); ++t)
      out << (t ? ";" : "") << FormatExact(lin->alpha[t]);
    out << "\n";
  } else {
    const auto& sig = std::get<SigmoidUtility>(instance.utility);
    out << "#utility=sigmoid\n#beta=" << FormatExact(sig.beta)
        << "\n#scale=" << FormatExact(sig.scale) << "\n";
  }
  const int d = instance.dimension();
  out << "role,id,threshold";
  for (int i = 0; i < d; ++i) out << ",v" << i;
  out << ",rho,demand,variance\n";
  for (int c = 0; c < instance.num_providers(); ++c) {
    const auto& p = instance.providers[c];
    out << "provider," << c << ',' << FormatExact(p.threshold);
    for (double x : p.embedding) out << ',' << FormatExact(x);
    out << ",,,\n";
  }
  for (int u = 0; u < instance.num_users(); ++u) {
    const auto& user = instance.users[u];
    out << "user," << u << ',';
    for (double x : user.mean) out << ',' << FormatExact(x);
    out << ',' << FormatExact(user.activation) << ',' << user.demand << ','
        << FormatExact(user.variance) << "\n";
  }
}

inline void SaveInstanceFile(const Instance& instance, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  SaveInstance(instance, out);
  if (!out) throw InputError("write failed: " + path);
}

namespace internal {

inline std::string Trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

inline std::vector<std::string> SplitCsv(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(Trim(cell));
  if (!line.empty() && line.back() == sep) out.push_back("");
  return out;
}

class LineError {
 public:
  explicit LineError(std::string source) : source_(std::move(source)) {}
  [[noreturn]] void Fail(int line, const std::string& what) const {
    throw InputError(source_ + ":" + std::to_string(line) + ": " + what);
  }
  double Number(int line, const std::string& text, const std::string& field) const {
    if (text.empty()) Fail(line, "missing " + field);
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || !std::isfinite(v))
      Fail(line, "bad " + field + " '" + text + "'");
    return v;
  }
  int Integer(int line, const std::string& text, const std::string& field) const {
    const double v = Number(line, text, field);
    if (v != static_cast<int>(v)) Fail(line, field + " must be an integer");
    return static_cast<int>(v);
  }

 private:
  std::string source_;
};

}  // namespace internal

// Parses an instance file. `threshold_override` replaces every provider
// threshold and lets provider rows leave theirs empty.
inline Instance LoadInstance(std::istream& in, const std::string& source = "<input>",
                             std::optional<double> threshold_override = std::nullopt) {
  const internal::LineError err(source);
  Instance inst;
  std::map<std::string, std::pair<std::string, int>> meta;
  std::string line;
  int lineno = 0;
  std::vector<std::string> header;
  int dim = -1, col_rho = -1, col_demand = -1, col_variance = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line = line.substr(3);
    line = internal::Trim(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (!header.empty()) err.Fail(lineno, "settings must precede the header");
      const auto eq = line.find('=');
      if (eq == std::string::npos) err.Fail(lineno, "expected #key=value");
      meta[internal::Trim(line.substr(1, eq - 1))] = {internal::Trim(line.substr(eq + 1)), lineno};
      continue;
    }
    const auto cells = internal::SplitCsv(line);
    if (header.empty()) {
      header = cells;
      if (header.size() < 4 || header[0] != "role" || header[1] != "id" ||
          header[2] != "threshold")
        err.Fail(lineno, "header must start with role,id,threshold,v0");
      dim = 0;
      std::size_t j = 3;
      while (j < header.size() && header[j] == "v" + std::to_string(dim)) {
        ++dim;
        ++j;
      }
      if (dim == 0) err.Fail(lineno, "header has no embedding columns");
      for (; j < header.size(); ++j) {
        if (header[j] == "rho") col_rho = static_cast<int>(j);
        else if (header[j] == "demand") col_demand = static_cast<int>(j);
        else if (header[j] == "variance") col_variance = static_cast<int>(j);
        else err.Fail(lineno, "unknown column '" + header[j] + "'");
      }
      continue;
    }
    if (cells.size() != header.size())
      err.Fail(lineno, "expected " + std::to_string(header.size()) + " fields, got " +
                           std::to_string(cells.size()));
    Vector v(dim);
    for (int i = 0; i < dim; ++i)
      v[i] = err.Number(lineno, cells[3 + i], "v" + std::to_string(i));
    const int id = err.Integer(lineno, cells[1], "id");
    if (cells[0] == "provider") {
      if (id != inst.num_providers())
        err.Fail(lineno, "provider id " + std::to_string(id) + " out of order");
      double nu = 0.0;
      if (threshold_override) nu = *threshold_override;
      else nu = err.Number(lineno, cells[2], "threshold");
      if (nu < 0) err.Fail(lineno, "threshold must be >= 0");
      inst.providers.push_back({id, std::move(v), nu});
    } else if (cells[0] == "user") {
      if (id != inst.num_users())
        err.Fail(lineno, "user id " + std::to_string(id) + " out of order");
      UserProfile u{id, std::move(v), 0.0, 1.0, 1};
      auto opt = [&](int col) { return col >= 0 && !cells[col].empty(); };
      if (opt(col_rho)) u.activation = err.Number(lineno, cells[col_rho], "rho");
      if (opt(col_demand)) u.demand = err.Integer(lineno, cells[col_demand], "demand");
      if (opt(col_variance)) u.variance = err.Number(lineno, cells[col_variance], "variance");
      if (u.activation < 0 || u.activation > 1) err.Fail(lineno, "rho must lie in [0, 1]");
      if (u.demand < 1) err.Fail(lineno, "demand must be >= 1");
      if (u.variance < 0) err.Fail(lineno, "variance must be >= 0");
      inst.users.push_back(std::move(u));
    } else {
      err.Fail(lineno, "unknown role '" + cells[0] + "'");
    }
  }
  if (header.empty()) err.Fail(lineno, "missing header");

  int at = 0;  // line of the setting being read
  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = meta.find(key);
    if (it == meta.end()) return std::nullopt;
    std::string v = it->second.first;
    at = it->second.second;
    meta.erase(it);
    return v;
  };
  if (auto k = take("reward_kind")) {
    if (*k == "dot") inst.reward_kind = RewardKind::kDotProduct;
    else if (*k == "negative_distance") inst.reward_kind = RewardKind::kNegativeDistance;
    else err.Fail(at, "unknown reward_kind '" + *k + "'");
  }
  if (auto v = take("reward_offset")) inst.reward_offset = err.Number(at, *v, "reward_offset");
  if (auto v = take("reward_floor")) inst.reward_floor = err.Number(at, *v, "reward_floor");
  if (auto v = take("horizon")) inst.horizon = err.Integer(at, *v, "horizon");
  if (auto v = take("slate_size")) inst.slate_size = err.Integer(at, *v, "slate_size");
  const std::string utility = take("utility").value_or("linear");
  if (utility == "linear") {
    Vector alpha;
    if (auto a = take("alpha")) {
      for (const auto& s : internal::SplitCsv(*a, ';')) alpha.push_back(err.Number(at, s, "alpha"));
    } else {
      alpha.assign(inst.horizon, 1.0);
    }
    inst.utility = LinearUtility{alpha};
  } else if (utility == "sigmoid") {
    SigmoidUtility sig;
    if (auto v = take("beta")) sig.beta = err.Number(at, *v, "beta");
    if (auto v = take("scale")) sig.scale = err.Number(at, *v, "scale");
    inst.utility = sig;
  } else {
    err.Fail(at, "unknown utility '" + utility + "'");
  }
  if (!meta.empty())
    err.Fail(meta.begin()->second.second, "unknown setting '" + meta.begin()->first + "'");
  try {
    ValidateInstance(inst);
  } catch (const InputError& e) {
    throw InputError(source + ": " + e.what());
  }
  return inst;
}

inline Instance LoadEmbeddings(const std::string& path,
                               std::optional<double> threshold_override = std::nullopt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  return LoadInstance(in, path, threshold_override);
}

}  // namespace ecomatch

#endif  // ECOMATCH_INSTANCE_IO_H_
