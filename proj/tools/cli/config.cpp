// Copyright 2026 The prepspace Authors
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

#include "cli/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

#include "prepspace/random.hpp"

namespace prepspace::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

std::string child(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) fail(path.empty() ? "config" : path, "expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : keys) known = known || item.key() == k;
    if (!known) fail(child(path, item.key()), "unknown field");
  }
}

double as_real(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "must be finite");
  return x;
}

double positive_real(const json& v, const std::string& path) {
  const double x = as_real(v, path);
  if (!(x > 0.0)) fail(path, "must be positive");
  return x;
}

std::int64_t as_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<std::int64_t>();
}

std::size_t positive_count(const json& v, const std::string& path) {
  const std::int64_t k = as_integer(v, path);
  if (k <= 0) fail(path, "must be a positive integer");
  return static_cast<std::size_t>(k);
}

Complex as_complex(const json& v, const std::string& path) {
  if (v.is_number()) return {as_real(v, path), 0.0};
  if (!v.is_array() || v.size() != 2) fail(path, "expected a [re, im] pair");
  return {as_real(v[0], index(path, 0)), as_real(v[1], index(path, 1))};
}

RVector as_vector(const json& v, int n, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array");
  if (static_cast<int>(v.size()) != n) {
    fail(path, "expected " + std::to_string(n) + " entries, got " + std::to_string(v.size()));
  }
  RVector out(n);
  for (int i = 0; i < n; ++i) out[i] = as_real(v[static_cast<std::size_t>(i)], index(path, static_cast<std::size_t>(i)));
  return out;
}

CMatrix as_matrix(const json& v, int n, const std::string& path) {
  if (!v.is_array() || static_cast<int>(v.size()) != n) {
    fail(path, "expected " + std::to_string(n) + " rows");
  }
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    const json& row = v[static_cast<std::size_t>(i)];
    const std::string rpath = index(path, static_cast<std::size_t>(i));
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      fail(rpath, "expected " + std::to_string(n) + " entries");
    }
    for (int j = 0; j < n; ++j) {
      m(i, j) = as_complex(row[static_cast<std::size_t>(j)], index(rpath, static_cast<std::size_t>(j)));
    }
  }
  return m;
}

HermitianObservable hermitian_at(const CMatrix& m, const std::string& path) {
  try {
    return validate_hermitian(m, path);
  } catch (const ValidationError& e) {
    fail(path, e.what());
  }
}

// `allow_hamiltonian` lets an observable refer to the Hamiltonian.
MatrixSpec parse_matrix(const json& v, int n, const std::string& path, Rng& frame_rng,
                        const std::optional<MatrixSpec>& hamiltonian, bool allow_hamiltonian) {
  only_keys(v, path, {"matrix", "diagonal", "generator", "scale"});
  const int forms = static_cast<int>(v.contains("matrix")) + static_cast<int>(v.contains("diagonal")) +
                    static_cast<int>(v.contains("generator"));
  if (forms != 1) fail(path, "give exactly one of \"matrix\", \"diagonal\" or \"generator\"");
  if (v.contains("scale") && !v.contains("generator")) {
    fail(child(path, "scale"), "only applies to generated matrices");
  }
  MatrixSpec spec;
  if (v.contains("matrix")) {
    spec.matrix = as_matrix(v["matrix"], n, child(path, "matrix"));
    spec.source = MatrixSource::dense;
  } else if (v.contains("diagonal")) {
    spec.matrix = as_vector(v["diagonal"], n, child(path, "diagonal")).cast<Complex>().asDiagonal();
    spec.source = MatrixSource::diagonal;
  } else {
    const json& g = v["generator"];
    const std::string gpath = child(path, "generator");
    if (!g.is_string()) fail(gpath, "expected a string");
    const std::string name = g.get<std::string>();
    if (name == "random-hermitian") {
      const double scale = v.contains("scale") ? positive_real(v["scale"], child(path, "scale")) : 1.0;
      spec.matrix = scale * random_hermitian(n, frame_rng);
      spec.source = MatrixSource::random_hermitian;
    } else if (name == "hamiltonian" && allow_hamiltonian) {
      if (!hamiltonian) fail(gpath, "refers to a hamiltonian the config does not define");
      spec = *hamiltonian;
      spec.source = MatrixSource::hamiltonian;
    } else {
      fail(gpath, "unknown generator \"" + name + "\"");
    }
  }
  hermitian_at(spec.matrix, path);
  return spec;
}

Preparation parse_initial(const json& v, int n, const std::string& path, std::uint64_t seed,
                          double validation_tol) {
  only_keys(v, path, {"p", "phi", "amplitudes", "generator", "min_p"});
  if (v.contains("generator")) {
    const std::string gpath = child(path, "generator");
    if (!v["generator"].is_string() || v["generator"].get<std::string>() != "random-interior") {
      fail(gpath, "expected \"random-interior\"");
    }
    double min_p = 1e-2;
    if (v.contains("min_p")) {
      min_p = as_real(v["min_p"], child(path, "min_p"));
      if (!(min_p >= 0.0 && min_p < 1.0 / n)) fail(child(path, "min_p"), "must lie in [0, 1/n)");
    }
    Rng rng = make_rng(substream_seed(seed, "init"));
    return random_interior_preparation(n, rng, min_p);
  }
  if (v.contains("min_p")) fail(child(path, "min_p"), "only applies to generated points");
  try {
    if (v.contains("amplitudes")) {
      if (v.contains("p") || v.contains("phi")) fail(path, "give either amplitudes or p/phi");
      const json& a = v["amplitudes"];
      const std::string apath = child(path, "amplitudes");
      if (!a.is_array() || static_cast<int>(a.size()) != n) {
        fail(apath, "expected " + std::to_string(n) + " entries");
      }
      CVector psi(n);
      for (int i = 0; i < n; ++i) psi[i] = as_complex(a[static_cast<std::size_t>(i)], index(apath, static_cast<std::size_t>(i)));
      return from_state_vector(StateVector::make(psi, 1e-10), validation_tol);
    }
    if (!v.contains("p")) fail(child(path, "p"), "missing");
    const RVector p = as_vector(v["p"], n, child(path, "p"));
    const RVector phi = v.contains("phi") ? as_vector(v["phi"], n, child(path, "phi")) : RVector::Zero(n);
    return Preparation::make(p, phi, validation_tol, 1e-10);
  } catch (const ConfigError&) {
    throw;
  } catch (const ValidationError& e) {
    fail(path, e.what());
  }
}

}  // namespace

std::string to_string(MatrixSource source) {
  switch (source) {
    case MatrixSource::dense:
      return "matrix";
    case MatrixSource::diagonal:
      return "diagonal";
    case MatrixSource::random_hermitian:
      return "random-hermitian";
    case MatrixSource::hamiltonian:
      return "hamiltonian";
  }
  return "unknown";
}

json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

ExperimentConfig parse_config(const json& j) {
  only_keys(j, "", {"n", "seed", "hamiltonian", "observable", "probe", "initial", "integrator",
                    "montecarlo", "statmech", "tolerances"});
  ExperimentConfig c;
  if (!j.contains("n")) fail("n", "missing");
  const std::int64_t n = as_integer(j["n"], "n");
  if (n < 2 || n > 64) fail("n", "must lie in [2, 64]");
  c.n = static_cast<int>(n);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) fail("seed", "expected a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }

  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    only_keys(t, "tolerances",
              {"validation_tol", "gradient_fd_step", "ode_step", "mc_rel_tol", "root_tol"});
    auto set = [&](const char* key, double& field) {
      if (t.contains(key)) field = positive_real(t[key], child("tolerances", key));
    };
    set("validation_tol", c.tolerances.validation_tol);
    set("gradient_fd_step", c.tolerances.gradient_fd_step);
    set("ode_step", c.tolerances.ode_step);
    set("mc_rel_tol", c.tolerances.mc_rel_tol);
    set("root_tol", c.tolerances.root_tol);
  }
  c.integrator.step = c.tolerances.ode_step;

  Rng frame_rng = make_rng(substream_seed(c.seed, "frame"));
  if (j.contains("hamiltonian")) {
    c.hamiltonian = parse_matrix(j["hamiltonian"], c.n, "hamiltonian", frame_rng, std::nullopt, false);
  }
  if (j.contains("observable")) {
    c.observable = parse_matrix(j["observable"], c.n, "observable", frame_rng, c.hamiltonian, true);
  }
  if (j.contains("probe")) {
    c.probe = parse_matrix(j["probe"], c.n, "probe", frame_rng, c.hamiltonian, true);
  }
  if (j.contains("initial")) {
    c.initial = parse_initial(j["initial"], c.n, "initial", c.seed, c.tolerances.validation_tol);
  }

  if (j.contains("integrator")) {
    const json& g = j["integrator"];
    only_keys(g, "integrator",
              {"method", "step", "boundary_margin", "newton_tol", "newton_max_iterations",
               "max_rotation"});
    if (g.contains("method")) {
      if (!g["method"].is_string()) fail("integrator.method", "expected a string");
      try {
        c.integrator.method = parse_integrator(g["method"].get<std::string>());
      } catch (const ValidationError& e) {
        fail("integrator.method", e.what());
      }
    }
    if (g.contains("step")) c.integrator.step = positive_real(g["step"], "integrator.step");
    if (g.contains("boundary_margin")) {
      c.integrator.boundary_margin = positive_real(g["boundary_margin"], "integrator.boundary_margin");
    }
    if (g.contains("newton_tol")) c.integrator.newton_tol = positive_real(g["newton_tol"], "integrator.newton_tol");
    if (g.contains("newton_max_iterations")) {
      c.integrator.newton_max_iterations =
          static_cast<int>(positive_count(g["newton_max_iterations"], "integrator.newton_max_iterations"));
    }
    if (g.contains("max_rotation")) {
      c.integrator.max_rotation = as_real(g["max_rotation"], "integrator.max_rotation");
      if (c.integrator.max_rotation < 0.0) fail("integrator.max_rotation", "must be nonnegative");
    }
  }

  if (j.contains("montecarlo")) {
    const json& m = j["montecarlo"];
    only_keys(m, "montecarlo", {"samples", "chunk_size", "flow_samples", "flow_step"});
    if (m.contains("samples")) c.samples = positive_count(m["samples"], "montecarlo.samples");
    if (m.contains("chunk_size")) c.chunk_size = positive_count(m["chunk_size"], "montecarlo.chunk_size");
    if (m.contains("flow_samples")) {
      c.flow_samples = positive_count(m["flow_samples"], "montecarlo.flow_samples");
    }
    if (m.contains("flow_step")) c.flow_step = positive_real(m["flow_step"], "montecarlo.flow_step");
    if (c.samples < 1000) fail("montecarlo.samples", "must be at least 1000");
    if (c.flow_samples < 1000) fail("montecarlo.flow_samples", "must be at least 1000");
  }

  if (j.contains("statmech")) {
    const json& s = j["statmech"];
    only_keys(s, "statmech", {"probe_points", "time_points"});
    if (s.contains("probe_points")) {
      c.probe_points = static_cast<int>(positive_count(s["probe_points"], "statmech.probe_points"));
    }
    if (s.contains("time_points")) {
      c.time_points = static_cast<int>(positive_count(s["time_points"], "statmech.time_points"));
      if (c.time_points < 2) fail("statmech.time_points", "must be at least 2");
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  try {
    return parse_config(j);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace prepspace::cli
