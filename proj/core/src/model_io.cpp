// Copyright 2026 The gsb Authors
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
#include "gsb/model_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gsb/error.hpp"

namespace gsb {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorKind::ConfigParse, msg); }

Complex parse_complex(const json& j, const char* what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  fail(std::string(what) + ": expected a number or [re, im]");
}

double number(const json& obj, const char* key, double fallback, bool required) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) fail(std::string("form factor: missing \"") + key + "\"");
    return fallback;
  }
  if (!it->is_number()) fail(std::string("form factor: \"") + key + "\" must be a number");
  return it->get<double>();
}

std::vector<double> numbers(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_array()) fail(std::string("form factor: \"") + key + "\" must be an array");
  std::vector<double> out;
  for (const auto& v : *it) {
    if (!v.is_number()) fail(std::string("form factor: \"") + key + "\" must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

FormFactor parse_form_factor(const json& j) {
  if (!j.is_object()) fail("form factor must be an object");
  auto kit = j.find("kind");
  if (kit == j.end() || !kit->is_string()) fail("form factor: missing \"kind\"");
  const std::string kind = kit->get<std::string>();
  const double center = number(j, "omega0", 0.0, false);
  if (kind == "flat") return FormFactor::flat(number(j, "gamma", 0, true), center);
  if (kind == "lorentzian") {
    return FormFactor::lorentzian(number(j, "gamma", 0, true), number(j, "lambda", 0, true), center);
  }
  if (kind == "box_window" || kind == "box") {
    return FormFactor::box_window(number(j, "gamma", 0, true), number(j, "W", 0, true), center);
  }
  if (kind == "tabulated") return FormFactor::tabulated(numbers(j, "omega"), numbers(j, "density"));
  fail("form factor: unknown kind \"" + kind + "\"");
}

nlohmann::ordered_json complex_json(Complex z) { return nlohmann::ordered_json::array({z.real(), z.imag()}); }

}  // namespace

ModelSpec parse_model(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) fail("model must be a JSON object");
  for (const char* key : {"H_e", "betas", "form_factors"}) {
    if (!j.contains(key) || !j[key].is_array()) fail(std::string("missing array \"") + key + "\"");
  }

  const auto& h = j["H_e"];
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(h.size()))));
  if (n < 1 || static_cast<std::size_t>(n * n) != h.size()) fail("H_e must hold n*n entries");
  ModelSpec spec;
  spec.h_excited.resize(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) spec.h_excited(r, c) = parse_complex(h[r * n + c], "H_e");
  }

  for (const auto& b : j["betas"]) {
    if (!b.is_array() || static_cast<Eigen::Index>(b.size()) != n) fail("each beta must have n entries");
    Vector v(n);
    for (Eigen::Index k = 0; k < n; ++k) v(k) = parse_complex(b[k], "beta");
    spec.betas.push_back(std::move(v));
  }
  try {
    for (const auto& f : j["form_factors"]) spec.form_factors.push_back(parse_form_factor(f));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigParse) throw;
    throw Error(ErrorKind::InvalidModel, e.what());
  }
  spec.validate();
  return spec;
}

ModelSpec load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot read model file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

std::string model_to_json(const ModelSpec& spec) {
  nlohmann::ordered_json j;
  auto h = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < spec.h_excited.rows(); ++r) {
    for (Eigen::Index c = 0; c < spec.h_excited.cols(); ++c) h.push_back(complex_json(spec.h_excited(r, c)));
  }
  j["H_e"] = h;
  auto betas = nlohmann::ordered_json::array();
  for (const auto& b : spec.betas) {
    auto v = nlohmann::ordered_json::array();
    for (Eigen::Index k = 0; k < b.size(); ++k) v.push_back(complex_json(b(k)));
    betas.push_back(v);
  }
  j["betas"] = betas;
  auto ffs = nlohmann::ordered_json::array();
  for (const auto& f : spec.form_factors) {
    nlohmann::ordered_json o;
    switch (f.kind()) {
      case FormFactorKind::Flat:
        o = {{"kind", "flat"}, {"gamma", f.gamma()}, {"omega0", f.center()}};
        break;
      case FormFactorKind::Lorentzian:
        o = {{"kind", "lorentzian"}, {"gamma", f.gamma()}, {"lambda", f.width()}, {"omega0", f.center()}};
        break;
      case FormFactorKind::BoxWindow:
        o = {{"kind", "box_window"}, {"gamma", f.gamma()}, {"W", f.width()}, {"omega0", f.center()}};
        break;
      case FormFactorKind::Tabulated:
        o = {{"kind", "tabulated"}, {"omega", f.grid()}, {"density", f.samples()}};
        break;
    }
    ffs.push_back(o);
  }
  j["form_factors"] = ffs;
  return j.dump(2) + "\n";
}

}  // namespace gsb
