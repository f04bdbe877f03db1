// Writes a random form as JSON: write_form <out.json> [free|ising|sinh_exp] [seed]

#include "zfexp/zfexp.hpp"

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
  using namespace zfexp;
  if (argc < 2) {
    std::cerr << "usage: write_form <out.json> [free|ising|sinh_exp] [seed]\n";
    return 2;
  }
  const std::string family = argc > 2 ? argv[2] : "free";
  const std::uint64_t seed = argc > 3 ? std::strtoull(argv[3], nullptr, 10) : 1;
  json model{{"family", family}};
  if (family == "sinh_exp") model["a"] = 1.0;

  const SpaceSpec spec{RapidityGrid({-0.9, 0.15, 1.1}, 1.0), scattering_from_json(model), 2};
  auto rng = keyed_rng(seed, "write_form", 0);
  write_json_file(argv[1], form_to_json(spec, random_form(rng, spec.space())));
}
