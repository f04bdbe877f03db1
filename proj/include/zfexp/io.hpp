#pragma once

#include "zfexp/contractions.hpp"
#include "zfexp/expansion.hpp"
#include "zfexp/fock.hpp"
#include "zfexp/kernel.hpp"
#include "zfexp/scattering.hpp"
#include "zfexp/zops.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace zfexp {

using json = nlohmann::json;

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw InputError("expected a complex number as [re, im], got " + j.dump());
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json to_json(const ScatteringModel& s) {
  json j{{"family", to_string(s.family())}};
  if (s.family() == ScatteringFamily::SinhExp) j["a"] = s.a();
  if (s.family() == ScatteringFamily::Tabulated) {
    json t = json::array();
    for (const auto& e : s.table()) t.push_back({e.theta, e.value.real(), e.value.imag()});
    j["table"] = t;
  }
  if (s.conjugated()) j["inverse"] = true;
  return j;
}

inline const std::vector<std::string>& supported_scattering_families() {
  static const std::vector<std::string> names{"free", "ising", "sinh_exp", "table"};
  return names;
}

/// Parses a scattering model. Tables are validated unless `validate` is false.
inline ScatteringModel scattering_from_json(const json& j, bool validate = true) {
  if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
    throw InputError("scattering model needs a string field \"family\"");
  const std::string fam = j["family"];
  ScatteringModel s = ScatteringModel::free();
  if (fam == "free") {
    s = ScatteringModel::free();
  } else if (fam == "ising") {
    s = ScatteringModel::ising();
  } else if (fam == "sinh_exp") {
    if (!j.contains("a") || !j["a"].is_number()) throw InputError("sinh_exp scattering needs a numeric \"a\"");
    s = ScatteringModel::sinh_exp(j["a"].get<double>());
  } else if (fam == "table") {
    if (!j.contains("table") || !j["table"].is_array()) throw InputError("table scattering needs an array \"table\"");
    std::vector<ScatteringModel::Sample> samples;
    for (const auto& row : j["table"]) {
      if (!row.is_array() || row.size() != 3) throw InputError("table rows must be [theta, re, im]");
      samples.push_back({row[0].get<double>(), {row[1].get<double>(), row[2].get<double>()}});
    }
    s = validate ? ScatteringModel::tabulated(std::move(samples)) : ScatteringModel::tabulated_unchecked(std::move(samples));
  } else {
    std::string list;
    for (const auto& n : supported_scattering_families()) list += (list.empty() ? "" : ", ") + n;
    throw InputError("unknown scattering family \"" + fam + "\"; supported: " + list);
  }
  if (j.value("inverse", false)) s = s.inverse();
  return s;
}

inline json to_json(const KernelTensor& f) {
  json values = json::array();
  for (Eigen::Index i = 0; i < f.values.size(); ++i) values.push_back(to_json(f.values(i)));
  return {{"kind", "kernel"}, {"m", f.m}, {"n", f.n}, {"grid_size", f.grid_size}, {"values", values}};
}

inline KernelTensor kernel_from_json(const json& j) {
  if (j.value("kind", "") != "kernel") throw InputError("not a kernel document");
  KernelTensor f(j.at("m").get<int>(), j.at("n").get<int>(), j.at("grid_size").get<int>());
  const auto& v = j.at("values");
  if (static_cast<Eigen::Index>(v.size()) != f.values.size())
    throw InputError("kernel has " + std::to_string(v.size()) + " values, expected " + std::to_string(f.values.size()));
  for (std::size_t i = 0; i < v.size(); ++i) f.values(static_cast<Eigen::Index>(i)) = complex_from_json(v[i]);
  return f;
}

namespace detail {

inline json nested_sector(const CVector& amps, std::int64_t offset, int N, int depth) {
  if (depth == 0) return to_json(amps(offset));
  json arr = json::array();
  const auto stride = ipow(N, depth - 1);
  for (int i = 0; i < N; ++i) arr.push_back(nested_sector(amps, offset + i * stride, N, depth - 1));
  return arr;
}

inline void flatten_sector(const json& j, CVector& out, std::int64_t offset, int N, int depth) {
  if (depth == 0) {
    out(offset) = complex_from_json(j);
    return;
  }
  if (!j.is_array() || static_cast<int>(j.size()) != N) throw InputError("state sector has the wrong shape");
  const auto stride = ipow(N, depth - 1);
  for (int i = 0; i < N; ++i) flatten_sector(j[i], out, offset + i * stride, N, depth - 1);
}

}  // namespace detail

inline json to_json(const FockState& s) {
  json sectors = json::array();
  for (int n = 0; n <= s.truncation(); ++n)
    sectors.push_back(detail::nested_sector(CVector(s.sector(n)), 0, s.grid.size(), n));
  return {{"kind", "state"},
          {"grid", s.grid.points()},
          {"mass", s.grid.mass()},
          {"truncation", s.truncation()},
          {"sectors", sectors}};
}

inline FockState state_from_json(const json& j) {
  RapidityGrid grid(j.at("grid").get<std::vector<double>>(), j.at("mass").get<double>());
  FockState s(grid, j.at("truncation").get<int>());
  const auto& sec = j.at("sectors");
  if (static_cast<int>(sec.size()) != s.truncation() + 1) throw InputError("state needs sectors 0..K");
  for (int n = 0; n <= s.truncation(); ++n) {
    CVector v(s.layout.sector_dim(n));
    detail::flatten_sector(sec[n], v, 0, grid.size(), n);
    s.sector(n) = v;
  }
  return s;
}

// Grid, scattering model and truncation: everything needed to rebuild a FockSpace.
struct SpaceSpec {
  RapidityGrid grid;
  ScatteringModel model;
  int truncation;

  FockSpace space() const { return FockSpace(grid, model, truncation); }
};

inline json to_json(const SpaceSpec& s) {
  return {{"grid", s.grid.points()}, {"mass", s.grid.mass()}, {"truncation", s.truncation}, {"scattering", to_json(s.model)}};
}

inline SpaceSpec space_from_json(const json& j) {
  return {RapidityGrid(j.at("grid").get<std::vector<double>>(), j.at("mass").get<double>()),
          scattering_from_json(j.at("scattering")), j.at("truncation").get<int>()};
}

inline json form_to_json(const SpaceSpec& spec, const QuadraticForm& a) {
  json blocks = json::array();
  for (int l = 0; l <= a.truncation(); ++l)
    for (int k = 0; k <= a.truncation(); ++k) {
      const CMatrix b = a.block(l, k);
      if (b.cwiseAbs().maxCoeff() == 0.0) continue;
      json values = json::array();
      for (Eigen::Index r = 0; r < b.rows(); ++r)
        for (Eigen::Index c = 0; c < b.cols(); ++c) values.push_back(to_json(b(r, c)));
      blocks.push_back({{"out", l}, {"in", k}, {"rows", b.rows()}, {"cols", b.cols()}, {"values", values}});
    }
  return {{"kind", "form"}, {"space", to_json(spec)}, {"blocks", blocks}};
}

inline std::pair<SpaceSpec, QuadraticForm> form_from_json(const json& j) {
  if (j.value("kind", "") != "form") throw InputError("not a form document");
  SpaceSpec spec = space_from_json(j.at("space"));
  QuadraticForm a(FockLayout(spec.grid.size(), spec.truncation));
  for (const auto& b : j.at("blocks")) {
    const int l = b.at("out"), k = b.at("in");
    if (l < 0 || k < 0 || l > spec.truncation || k > spec.truncation) throw InputError("form block outside 0..K");
    auto blk = a.block(l, k);
    const auto& v = b.at("values");
    if (b.at("rows").get<Eigen::Index>() != blk.rows() || b.at("cols").get<Eigen::Index>() != blk.cols() ||
        static_cast<Eigen::Index>(v.size()) != blk.size())
      throw InputError("form block (" + std::to_string(l) + "," + std::to_string(k) + ") has the wrong shape");
    for (Eigen::Index r = 0; r < blk.rows(); ++r)
      for (Eigen::Index c = 0; c < blk.cols(); ++c) blk(r, c) = complex_from_json(v[r * blk.cols() + c]);
  }
  return {spec, a};
}

inline json to_json(const Contraction& c) {
  json pairs = json::array();
  for (auto [l, r] : c.pairs()) pairs.push_back({l, r});
  return {{"m", c.m()}, {"n", c.n()}, {"pairs", pairs}};
}

inline json read_json_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw InputError("cannot open " + p.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(p.string() + ": " + e.what());
  }
}

inline void write_json_file(const std::filesystem::path& p, const json& j) {
  std::ofstream out(p);
  if (!out) throw InputError("cannot write " + p.string());
  out << j.dump(2) << '\n';
}

/// Directory layout: manifest.json plus one kernel file per (m, n).
inline void write_coefficients(const std::filesystem::path& dir, const SpaceSpec& spec, const CoefficientFamily& fam) {
  std::filesystem::create_directories(dir);
  json entries = json::array();
  for (int m = 0; m <= fam.truncation; ++m)
    for (int n = 0; n <= fam.truncation; ++n) {
      const std::string file = "f_" + std::to_string(m) + "_" + std::to_string(n) + ".json";
      write_json_file(dir / file, to_json(fam.at(m, n)));
      entries.push_back({{"m", m}, {"n", n}, {"file", file}});
    }
  write_json_file(dir / "manifest.json", {{"kind", "coefficients"}, {"space", to_json(spec)}, {"entries", entries}});
}

inline std::pair<SpaceSpec, CoefficientFamily> read_coefficients(const std::filesystem::path& dir) {
  const json manifest = read_json_file(dir / "manifest.json");
  if (manifest.value("kind", "") != "coefficients") throw InputError("not a coefficient manifest");
  SpaceSpec spec = space_from_json(manifest.at("space"));
  CoefficientFamily fam(spec.grid, spec.truncation);
  for (const auto& e : manifest.at("entries")) {
    const int m = e.at("m"), n = e.at("n");
    KernelTensor f = kernel_from_json(read_json_file(dir / e.at("file").get<std::string>()));
    if (f.m != m || f.n != n || f.grid_size != spec.grid.size())
      throw InputError("coefficient file " + e.at("file").get<std::string>() + " does not match its manifest entry");
    fam.at(m, n) = std::move(f);
  }
  return {spec, fam};
}

}  // namespace zfexp
