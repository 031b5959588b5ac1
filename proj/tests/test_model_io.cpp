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
#include <doctest.h>

#include "gsb/error.hpp"
#include "gsb/model_io.hpp"

using namespace gsb;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("parse a two-level model") {
  const ModelSpec spec = parse_model(R"({
    "H_e": [0.0, [0.2, 0.1], [0.2, -0.1], 0.5],
    "betas": [[1.0, [0.5, 0.0]]],
    "form_factors": [{"kind": "lorentzian", "gamma": 2.0, "lambda": 0.5, "omega0": 0.3}]
  })");
  CHECK(spec.levels() == 2);
  CHECK(spec.h_excited(0, 1) == Complex(0.2, 0.1));
  CHECK(spec.betas[0](1) == Complex(0.5, 0.0));
  CHECK(spec.form_factors[0].kind() == FormFactorKind::Lorentzian);
  CHECK(spec.form_factors[0].width() == 0.5);
  CHECK(spec.form_factors[0].center() == 0.3);
}

TEST_CASE("every kind round-trips") {
  ModelSpec spec;
  spec.h_excited = Matrix{{0.1, 0.0, 0.0}, {0.0, 0.2, 0.0}, {0.0, 0.0, -0.3}};
  spec.betas = {Vector{{1.0, 0.0, 0.0}}, Vector{{0.0, 1.0, 0.0}}, Vector{{0.0, 0.0, Complex(0.0, 1.0)}}};
  spec.form_factors = {FormFactor::box_window(1.0, 3.0, 0.1), FormFactor::tabulated({-1.0, 0.0, 2.0}, {0.1, 0.3, 0.0}),
                       FormFactor::lorentzian(0.5, 1.0)};
  const std::string text = model_to_json(spec);
  const ModelSpec back = parse_model(text);
  CHECK(model_to_json(back) == text);
  CHECK(back.form_factors[1].grid() == std::vector<double>{-1.0, 0.0, 2.0});
  CHECK(parse_model(R"({"H_e": [0], "betas": [[1]], "form_factors": [{"kind": "box", "gamma": 1, "W": 2}]})")
            .form_factors[0]
            .kind() == FormFactorKind::BoxWindow);
  CHECK(parse_model(R"({"H_e": [0], "betas": [[1]], "form_factors": [{"kind": "flat", "gamma": 1}]})").all_flat());
}

TEST_CASE("malformed input is a parse error") {
  for (const char* text : {
           "not json",
           "[1, 2]",
           R"({"H_e": [0], "betas": [[1]]})",
           R"({"H_e": [0, 1, 2], "betas": [[1]], "form_factors": []})",
           R"({"H_e": [0], "betas": [[1, 2]], "form_factors": [{"kind": "flat", "gamma": 1}]})",
           R"({"H_e": [0], "betas": [[1]], "form_factors": [{"kind": "ohmic", "gamma": 1}]})",
           R"({"H_e": [0], "betas": [[1]], "form_factors": [{"kind": "lorentzian", "gamma": 1}]})",
           R"({"H_e": ["x"], "betas": [[1]], "form_factors": [{"kind": "flat", "gamma": 1}]})",
       }) {
    CAPTURE(text);
    CHECK(kind_of([&] { (void)parse_model(text); }) == ErrorKind::ConfigParse);
  }
  CHECK(kind_of([] { (void)load_model("/nonexistent/model.json"); }) == ErrorKind::ConfigParse);
}

TEST_CASE("physically invalid models are rejected") {
  CHECK(kind_of([] {
          (void)parse_model(R"({"H_e": [0, 1, 0, 0], "betas": [[1, 0]], "form_factors": [{"kind": "flat", "gamma": 1}]})");
        }) == ErrorKind::InvalidModel);
  CHECK(kind_of([] {
          (void)parse_model(R"({"H_e": [0], "betas": [[1]], "form_factors": [{"kind": "flat", "gamma": -1}]})");
        }) == ErrorKind::InvalidModel);
}
