#pragma once

// Small builders shared by the unit tests.

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

#include "liposim/geometry.hpp"
#include "liposim/random.hpp"
#include "liposim/speclang/diagnostic.hpp"
#include "liposim/types.hpp"

namespace liposim::testing {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string scenario_path(const std::string& name) {
  return std::string(LIPOSIM_SOURCE_DIR) + "/scenarios/" + name;
}

// A sphere whose volume is exactly `volume` fL (up to rounding).
inline Compartment sphere_of_volume(std::string id, int depth, double volume) {
  return Compartment::sphere(std::move(id), depth, sphere_diameter(volume));
}

inline Mvl single(Compartment root, Morphology m = Morphology::Plain) {
  Mvl mvl;
  mvl.root = std::move(root);
  mvl.morphology = m;
  return mvl;
}

// Kinetic two-box system: a bounded environment and one MVL root of the
// same volume, with one small-polar species `u` at the given permeability.
struct TwoBox {
  SystemState state;
  SpeciesId u;
  double volume = 100.0;

  TwoBox(double c_out, double c_in, double permeability, PermClass cls = PermClass::SmallPolar) {
    state.mode = Mode::Kinetic;
    u = state.species.add(Species{"u", cls, permeability});
    state.environment.unbounded = false;
    state.environment.volume = volume;
    state.environment.contents.set(u, c_out * volume);
    Compartment root = sphere_of_volume("m0", 1, volume);
    root.contents.set(u, c_in * root.volume);
    state.mvls.push_back(single(std::move(root)));
  }

  double c_out() const { return state.environment.concentration(u); }
  double c_in() const { return state.mvls[0].root.contents[u] / state.mvls[0].root.volume; }
  // Rate constant of the relaxation c_out - c_in ~ exp(-k t).
  double k() const {
    const Compartment& r = state.mvls[0].root;
    return *state.species[u].permeability_override * sphere_area(r.diameter) *
           (1.0 / r.volume + 1.0 / state.environment.volume);
  }
};

// Random abstract system: up to 5 species, up to 5 rules, counts up to 20,
// an MVL of height 1 to 3 and any product targets.
inline SystemState random_abstract_system(Rng& rng) {
  SystemState s;
  s.mode = Mode::Abstract;
  s.environment.unbounded = false;
  s.environment.volume = 1.0;
  const int n_species = static_cast<int>(uniform_int(rng, 1, 5));
  for (int i = 0; i < n_species; ++i) s.species.add(Species{"s" + std::to_string(i), PermClass::SmallPolar, {}});
  const auto any_species = [&] { return SpeciesId{static_cast<std::uint32_t>(uniform_index(rng, n_species))}; };
  const auto fill = [&](Compartment& c) {
    for (int i = 0; i < n_species; ++i) c.contents.set(SpeciesId{static_cast<std::uint32_t>(i)}, static_cast<double>(uniform_int(rng, 0, 20)));
  };

  Compartment root = Compartment::sphere("m0", 1, 60.0);
  fill(root);
  const int height = static_cast<int>(uniform_int(rng, 1, 3));
  if (height >= 2) {
    const int kids = static_cast<int>(uniform_int(rng, 1, 3));
    for (int k = 0; k < kids; ++k) {
      Compartment child = Compartment::sphere("m0." + std::to_string(k), 2, 15.0);
      fill(child);
      if (height == 3 && k == 0) {
        Compartment grandchild = Compartment::sphere("m0.0.0", 3, 5.0);
        fill(grandchild);
        child.children.push_back(std::move(grandchild));
      }
      root.children.push_back(std::move(child));
    }
  }
  s.mvls.push_back(single(std::move(root), morphology_for_height(height)));

  const int n_rules = static_cast<int>(uniform_int(rng, 1, 5));
  for (int r = 0; r < n_rules; ++r) {
    Rule rule;
    rule.name = "r" + std::to_string(r);
    const int reactants = static_cast<int>(uniform_int(rng, 1, 2));
    for (int i = 0; i < reactants; ++i) rule.reactants.push_back(Term{any_species(), static_cast<std::uint32_t>(uniform_int(rng, 1, 3))});
    if (uniform01(rng) < 0.3) rule.catalysts.push_back(Term{any_species(), 1});
    const int products = static_cast<int>(uniform_int(rng, 0, 3));
    for (int i = 0; i < products; ++i) {
      const auto t = static_cast<Target>(uniform_index(rng, 3));
      rule.products.push_back(Product{any_species(), static_cast<std::uint32_t>(uniform_int(rng, 1, 2)), t});
    }
    rule.kinetics = AbstractLaw{static_cast<int>(uniform_int(rng, 0, 1))};
    s.rules.push_back(std::move(rule));
  }
  return s;
}

// One to four random edits of `source`: byte deletions, insertions,
// replacements, duplicated or dropped lines, truncation, nesting bombs.
inline std::string mutate(const std::string& source, Rng& rng) {
  static const std::vector<std::string> fragments{
      "{", "}", "(", ")", ":", ",", "->", "@", "=", "/", "+", "#", "\n", "\xff", "\xc3\xa9", "-", "1e999",
      "-0", "nan", "um", "mM", "s", "fL", "compartment", "rule", "species", "run", "at", "do", "generator",
      "environment", "none", "in", "out", "urase", "99999999999999999999999", "\t", "\"", std::string(1, '\0')};
  std::string s = source;
  const int edits = static_cast<int>(uniform_int(rng, 1, 4));
  for (int e = 0; e < edits; ++e) {
    const std::size_t pos = s.empty() ? 0 : uniform_index(rng, s.size() + 1);
    switch (uniform_index(rng, 8)) {
      case 0:
        if (!s.empty() && pos < s.size()) s.erase(pos, 1 + uniform_index(rng, 8));
        break;
      case 1:
        s.insert(pos, 1, static_cast<char>(uniform_index(rng, 256)));
        break;
      case 2:
        s.insert(pos, fragments[uniform_index(rng, fragments.size())]);
        break;
      case 3:
        if (pos < s.size()) s[pos] = static_cast<char>(uniform_index(rng, 128));
        break;
      case 4: {
        // Duplicate the line holding pos.
        const std::size_t b = s.rfind('\n', pos == 0 ? 0 : pos - 1);
        const std::size_t start = b == std::string::npos ? 0 : b + 1;
        const std::size_t end = std::min(s.find('\n', start), s.size());
        s.insert(start, s.substr(start, end - start) + "\n");
        break;
      }
      case 5:
        s.resize(std::min(pos, s.size()));
        break;
      case 6:
        s.insert(pos, std::string(uniform_index(rng, 200), '{'));
        break;
      default: {
        const std::size_t b = s.rfind('\n', pos == 0 ? 0 : pos - 1);
        const std::size_t start = b == std::string::npos ? 0 : b + 1;
        const std::size_t end = std::min(s.find('\n', start), s.size());
        s.erase(start, end - start);
        break;
      }
    }
  }
  return s;
}

// A diagnostic points at a real place: an existing line (or the one just
// past the end) and a column within it or one past its end.
inline bool positioned(const speclang::Diagnostic& d, std::string_view source) {
  const int lines = static_cast<int>(std::count(source.begin(), source.end(), '\n')) + 1;
  if (d.line < 1 || d.line > lines + 1 || d.column < 1) return false;
  return d.column <= static_cast<int>(speclang::source_line(source, d.line).size()) + 1 && !d.message.empty();
}

}  // namespace liposim::testing
