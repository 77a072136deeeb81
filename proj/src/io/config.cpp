#include "gpvortex/io/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "gpvortex/errors.hpp"
#include "json.hpp"

namespace gpv::io {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& ptr, const std::string& what) {
  throw ParameterError("config " + ptr + ": " + what);
}

void only_keys(const json& j, const std::string& ptr, const std::set<std::string>& allowed) {
  if (!j.is_object()) fail(ptr.empty() ? "/" : ptr, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) fail(ptr + "/" + it.key(), "unknown field");
}

double number(const json& j, const std::string& ptr) {
  if (!j.is_number()) fail(ptr, "expected a number");
  return j.get<double>();
}

long integer(const json& j, const std::string& ptr) {
  if (!j.is_number_integer()) fail(ptr, "expected an integer");
  return j.get<long>();
}

std::string text(const json& j, const std::string& ptr) {
  if (!j.is_string()) fail(ptr, "expected a string");
  return j.get<std::string>();
}

template <class F>
void with(const json& obj, const std::string& ptr, const char* key, F f) {
  if (obj.contains(key)) f(obj.at(key), ptr + "/" + key);
}

template <class T, class Parse>
T parse_enum(const json& j, const std::string& ptr, Parse p) {
  try {
    return p(text(j, ptr));
  } catch (const ParameterError& e) {
    fail(ptr, e.what());
  }
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParameterError(std::string("config: malformed JSON: ") + e.what());
  }
  RunConfig c;
  only_keys(j, "", {"schema_version", "regime", "profile", "grid", "solver", "cells", "sweep"});
  with(j, "", "schema_version", [&](const json& v, const std::string& p) {
    c.schema_version = static_cast<int>(integer(v, p));
    if (c.schema_version != kConfigSchemaVersion) fail(p, "unsupported schema version");
  });
  with(j, "", "regime", [&](const json& o, const std::string& p) {
    only_keys(o, p, {"epsilon", "omega0"});
    with(o, p, "epsilon", [&](const json& v, const std::string& q) {
      c.epsilon = number(v, q);
      if (!(c.epsilon > 0.0 && c.epsilon < 1.0)) fail(q, "expected 0 < epsilon < 1");
    });
    with(o, p, "omega0", [&](const json& v, const std::string& q) {
      c.omega0 = number(v, q);
      if (!(c.omega0 > 0.0)) fail(q, "expected omega0 > 0");
    });
  });
  with(j, "", "profile", [&](const json& o, const std::string& p) {
    only_keys(o, p, {"nodes", "domain"});
    with(o, p, "nodes", [&](const json& v, const std::string& q) {
      c.nodes = static_cast<int>(integer(v, q));
      if (c.nodes < 8) fail(q, "expected nodes >= 8");
    });
    with(o, p, "domain", [&](const json& v, const std::string& q) {
      c.domain = parse_enum<Domain>(v, q, domain_from_string);
    });
  });
  with(j, "", "grid", [&](const json& o, const std::string& p) {
    only_keys(o, p, {"Nr", "Nt", "r0"});
    with(o, p, "Nr", [&](const json& v, const std::string& q) {
      c.Nr = static_cast<int>(integer(v, q));
      if (c.Nr < 16) fail(q, "expected Nr >= 16");
    });
    with(o, p, "Nt", [&](const json& v, const std::string& q) {
      c.Nt = static_cast<int>(integer(v, q));
      if (c.Nt < 8 || c.Nt % 2) fail(q, "expected an even integer >= 8");
    });
    with(o, p, "r0", [&](const json& v, const std::string& q) {
      c.r0 = number(v, q);
      if (!(c.r0 > 0.0 && c.r0 < 0.5)) fail(q, "expected 0 < r0 < 0.5");
    });
  });
  with(j, "", "solver", [&](const json& o, const std::string& p) {
    only_keys(o, p,
              {"max_iters", "tol", "residual_tol", "step", "fixed_step", "preconditioner", "seed", "init",
               "lattice_vortices", "omega"});
    auto& s = c.solve;
    with(o, p, "max_iters", [&](const json& v, const std::string& q) {
      s.max_iters = static_cast<int>(integer(v, q));
      if (s.max_iters < 1) fail(q, "expected max_iters >= 1");
    });
    with(o, p, "tol", [&](const json& v, const std::string& q) {
      s.tol = number(v, q);
      if (!(s.tol > 0.0)) fail(q, "expected tol > 0");
    });
    with(o, p, "residual_tol", [&](const json& v, const std::string& q) {
      s.residual_tol = number(v, q);
      if (!(s.residual_tol > 0.0)) fail(q, "expected residual_tol > 0");
    });
    with(o, p, "step", [&](const json& v, const std::string& q) {
      s.step = parse_enum<StepPolicy>(v, q, step_policy_from_string);
    });
    with(o, p, "fixed_step", [&](const json& v, const std::string& q) {
      s.fixed_step = number(v, q);
      if (!(s.fixed_step > 0.0)) fail(q, "expected fixed_step > 0");
    });
    with(o, p, "preconditioner", [&](const json& v, const std::string& q) {
      s.precond = parse_enum<Preconditioner>(v, q, preconditioner_from_string);
    });
    with(o, p, "seed", [&](const json& v, const std::string& q) {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long>() >= 0)) fail(q, "expected a non-negative integer");
      s.seed = v.get<std::uint64_t>();
    });
    with(o, p, "init", [&](const json& v, const std::string& q) { s.init = parse_enum<InitKind>(v, q, init_from_string); });
    with(o, p, "lattice_vortices", [&](const json& v, const std::string& q) {
      s.lattice_vortices = static_cast<int>(integer(v, q));
      if (s.lattice_vortices < 0) fail(q, "expected lattice_vortices >= 0");
    });
    with(o, p, "omega", [&](const json& v, const std::string& q) {
      if (v.is_null())
        s.omega.reset();
      else
        s.omega = integer(v, q);
    });
  });
  with(j, "", "cells", [&](const json& o, const std::string& p) {
    only_keys(o, p, {"alpha", "c"});
    with(o, p, "alpha", [&](const json& v, const std::string& q) {
      c.cells.alpha = number(v, q);
      if (!(c.cells.alpha >= 0.0 && c.cells.alpha < 0.5)) fail(q, "expected 0 <= alpha < 0.5");
    });
    with(o, p, "c", [&](const json& v, const std::string& q) {
      c.cells.c = number(v, q);
      if (!(c.cells.c > 0.0)) fail(q, "expected c > 0");
    });
  });
  with(j, "", "sweep", [&](const json& o, const std::string& p) {
    only_keys(o, p, {"omega0", "warm_start"});
    with(o, p, "omega0", [&](const json& v, const std::string& q) {
      if (!v.is_array()) fail(q, "expected an array of numbers");
      c.sweep_omega0.clear();
      for (std::size_t k = 0; k < v.size(); ++k) {
        const double w = number(v[k], q + "/" + std::to_string(k));
        if (!(w > 0.0)) fail(q + "/" + std::to_string(k), "expected omega0 > 0");
        c.sweep_omega0.push_back(w);
      }
    });
    with(o, p, "warm_start", [&](const json& v, const std::string& q) {
      if (!v.is_boolean()) fail(q, "expected a boolean");
      c.warm_start = v.get<bool>();
    });
  });
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParameterError("missing input artifact: " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["schema_version"] = c.schema_version;
  j["regime"] = {{"epsilon", c.epsilon}, {"omega0", c.omega0}};
  j["profile"] = {{"nodes", c.nodes}, {"domain", to_string(c.domain)}};
  j["grid"] = {{"Nr", c.Nr}, {"Nt", c.Nt}, {"r0", c.r0}};
  const auto& s = c.solve;
  nlohmann::ordered_json sj;
  sj["max_iters"] = s.max_iters;
  sj["tol"] = s.tol;
  sj["residual_tol"] = s.residual_tol;
  sj["step"] = to_string(s.step);
  sj["fixed_step"] = s.fixed_step;
  sj["preconditioner"] = to_string(s.precond);
  sj["seed"] = s.seed;
  sj["init"] = to_string(s.init);
  sj["lattice_vortices"] = s.lattice_vortices;
  sj["omega"] = s.omega ? nlohmann::ordered_json(*s.omega) : nlohmann::ordered_json(nullptr);
  j["solver"] = sj;
  j["cells"] = {{"alpha", c.cells.alpha}, {"c", c.cells.c}};
  j["sweep"] = {{"omega0", c.sweep_omega0}, {"warm_start", c.warm_start}};
  return j.dump(2);
}

}  // namespace gpv::io
