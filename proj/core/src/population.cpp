#include "liposim/population.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <thread>

#include "liposim/error.hpp"
#include "liposim/geometry.hpp"

namespace liposim {

namespace {

constexpr std::array<Morphology, 4> kSampledTypes{Morphology::T1a, Morphology::T1b, Morphology::T2,
                                                  Morphology::T3};

void check_fraction(const FractionRange& r, const char* what) {
  if (!(r.low > 0.0) || !(r.high <= 1.0) || r.low > r.high) {
    throw InvalidArgument(std::string(what) + " must satisfy 0 < low <= high <= 1");
  }
}

std::vector<double> draw_diameters(Rng& rng, int count, double parent_diameter, const FractionRange& f) {
  std::vector<double> d(static_cast<std::size_t>(count));
  for (auto& x : d) x = parent_diameter * uniform_real(rng, f.low, f.high);
  return d;
}

// Longest prefix of `diameters` whose volumes fit the packing headroom.
std::size_t packing_prefix(const std::vector<double>& diameters, double parent_volume) {
  double used = 0.0;
  for (std::size_t i = 0; i < diameters.size(); ++i) {
    used += sphere_volume(diameters[i]);
    if (used > kPackingHeadroom * parent_volume) return i;
  }
  return diameters.size();
}

void attach(Compartment& parent, const std::vector<double>& diameters, std::size_t count) {
  parent.children.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    parent.children.push_back(
        Compartment::sphere(parent.id + "." + std::to_string(j), parent.depth + 1, diameters[j]));
  }
}

}  // namespace

void GeneratorParams::validate() const {
  double sum = 0.0;
  for (double p : type_prevalence) {
    if (!(p >= 0.0)) throw InvalidArgument("type prevalences must be >= 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw InvalidArgument("type prevalences must sum to 1");
  for (const auto* spec : {&outer_diameter, &t3_diameter}) {
    if (!(spec->low > 0.0)) throw InvalidArgument("diameter ranges must be positive");
  }
  for (const auto* spec : {&outer_diameter, &t3_diameter, &internal_count}) {
    if (spec->low > spec->high) throw InvalidArgument("distribution range needs low <= high");
    if (spec->mean < spec->low || spec->mean > spec->high) {
      throw InvalidArgument("distribution range must contain the mean");
    }
    if (spec->sd < 0.0) throw InvalidArgument("standard deviation must be >= 0");
  }
  if (internal_count.low < 1.0 || internal_count.low != std::floor(internal_count.low) ||
      internal_count.high != std::floor(internal_count.high)) {
    throw InvalidArgument("internal count range must be integers >= 1");
  }
  if (t3_internal_count.low < 1 || t3_internal_count.low > t3_internal_count.high) {
    throw InvalidArgument("T3 internal count range must satisfy 1 <= low <= high");
  }
  check_fraction(child_diameter_fraction, "child diameter fraction");
  check_fraction(t3_child_diameter_fraction, "T3 child diameter fraction");
}

PopulationSampler::PopulationSampler(GeneratorParams params)
    : params_((params.validate(), std::move(params))),
      outer_(TruncatedDistribution::fit(params_.outer_diameter, params_.family)),
      t3_(TruncatedDistribution::fit(params_.t3_diameter, params_.family)),
      count_(TruncatedDistribution::fit(params_.internal_count, DistributionFamily::Normal, true)) {}

Mvl PopulationSampler::sample(Rng& rng, const std::string& id) const {
  // Draw order is part of the reproducibility contract: type, diameter,
  // count, child diameters, then the T1b grandchildren.
  const double u = uniform01(rng);
  Morphology morphology = Morphology::T3;
  double cumulative = 0.0;
  for (std::size_t i = 0; i < kSampledTypes.size(); ++i) {
    cumulative += params_.type_prevalence[i];
    if (u < cumulative && params_.type_prevalence[i] > 0.0) {
      morphology = kSampledTypes[i];
      break;
    }
  }
  if (u >= cumulative) {
    // Rounding left u above the last cumulative sum; take the last nonzero type.
    for (std::size_t i = kSampledTypes.size(); i-- > 0;) {
      if (params_.type_prevalence[i] > 0.0) {
        morphology = kSampledTypes[i];
        break;
      }
    }
  }

  const bool amorphous = morphology == Morphology::T3;
  const double diameter = amorphous ? t3_.sample(rng) : outer_.sample(rng);
  const int count = amorphous
                        ? static_cast<int>(uniform_int(rng, params_.t3_internal_count.low,
                                                       params_.t3_internal_count.high))
                        : static_cast<int>(count_.sample(rng));
  const FractionRange& fraction =
      amorphous ? params_.t3_child_diameter_fraction : params_.child_diameter_fraction;

  Mvl mvl;
  mvl.morphology = morphology;
  mvl.root = Compartment::sphere(id, 1, diameter);

  bool packed = false;
  for (int attempt = 0; attempt < kMaxPackingAttempts && !packed; ++attempt) {
    auto diameters = draw_diameters(rng, count, diameter, fraction);
    if (packing_prefix(diameters, mvl.root.volume) == diameters.size()) {
      attach(mvl.root, diameters, diameters.size());
      packed = true;
    }
  }
  if (!packed) {
    throw GenerationError("MVL '" + id + "': " + std::to_string(count) +
                          " children did not fit within 0.9 of the parent volume after " +
                          std::to_string(kMaxPackingAttempts) + " attempts");
  }

  if (morphology == Morphology::T1b) {
    Compartment& host = mvl.root.children[uniform_index(rng, mvl.root.children.size())];
    const int wanted = static_cast<int>(count_.sample(rng));
    std::vector<double> best;
    std::size_t best_len = 0;
    for (int attempt = 0; attempt < kMaxPackingAttempts; ++attempt) {
      auto diameters = draw_diameters(rng, wanted, host.diameter, params_.child_diameter_fraction);
      const std::size_t len = packing_prefix(diameters, host.volume);
      if (len > best_len) {
        best_len = len;
        best = std::move(diameters);
      }
      if (best_len == static_cast<std::size_t>(wanted)) break;
    }
    if (best_len == 0) {
      throw GenerationError("MVL '" + id + "': no grandchild fits inside compartment '" + host.id + "'");
    }
    attach(host, best, best_len);
  }
  return mvl;
}

Mvl sample_mvl(const GeneratorParams& params, Rng& rng, const std::string& id) {
  return PopulationSampler(params).sample(rng, id);
}

std::vector<Mvl> sample_population(const GeneratorParams& params, std::size_t n, std::uint64_t seed,
                                   unsigned jobs) {
  if (n == 0) throw InvalidArgument("population size must be >= 1");
  const PopulationSampler sampler(params);
  std::vector<Mvl> out(n);
  std::vector<std::exception_ptr> errors(n);

  const auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        Rng rng = derive_stream(seed, i);
        out[i] = sampler.sample(rng, "m" + std::to_string(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  if (jobs == 1) {
    work(0, n);
  } else {
    std::vector<std::thread> threads;
    const std::size_t chunk = (n + jobs - 1) / jobs;
    for (std::size_t begin = 0; begin < n; begin += chunk) {
      threads.emplace_back(work, begin, std::min(n, begin + chunk));
    }
    for (auto& t : threads) t.join();
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const GenerationError& e) {
      throw GenerationError("item " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

// --- statistics ------------------------------------------------------------

std::optional<Summary> summarize(std::span<const double> values) {
  if (values.empty()) return std::nullopt;
  Summary s;
  s.n = values.size();
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sd = s.n > 1 ? std::sqrt(ss / static_cast<double>(s.n - 1)) : 0.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

PopulationStats population_stats(std::span<const Mvl> population) {
  if (population.empty()) throw InvalidArgument("population is empty");
  PopulationStats stats;
  std::map<Morphology, std::vector<double>> diameters, counts;
  std::vector<double> d12, d3, c12;
  for (const auto& mvl : population) {
    if (mvl.lysed()) continue;
    ++stats.total;
    ++stats.counts[mvl.morphology];
    ++stats.depth_histogram[tree_height(mvl.root)];
    const double d = mvl.root.diameter;
    const auto c = static_cast<double>(mvl.root.children.size());
    diameters[mvl.morphology].push_back(d);
    counts[mvl.morphology].push_back(c);
    if (mvl.morphology == Morphology::T3) {
      d3.push_back(d);
    } else if (mvl.morphology != Morphology::Plain) {
      d12.push_back(d);
      c12.push_back(c);
    }
  }
  if (stats.total == 0) throw InvalidArgument("population holds only lysed MVLs");
  for (const auto& [m, v] : diameters) stats.diameter_by_type[m] = *summarize(v);
  for (const auto& [m, v] : counts) stats.internal_count_by_type[m] = *summarize(v);
  stats.diameter_t12 = summarize(d12);
  stats.diameter_t3 = summarize(d3);
  stats.internal_count_t12 = summarize(c12);
  return stats;
}

std::string format_stats_table(const PopulationStats& stats) {
  const auto num = [](double v, int precision) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(precision) << v;
    return os.str();
  };
  struct Column {
    std::string title;
    const std::optional<Summary>* summary;
    int precision;
  };
  const std::array<Column, 3> columns{{{"MVL size T1a/T1b/T2 (um)", &stats.diameter_t12, 2},
                                       {"MVL size T3 (um)", &stats.diameter_t3, 2},
                                       {"Internal liposomes", &stats.internal_count_t12, 2}}};
  const auto cell = [&](const Column& c, int row) -> std::string {
    if (!c.summary->has_value()) return "-";
    const Summary& s = **c.summary;
    switch (row) {
      case 0:
        return num(s.mean, c.precision);
      case 1:
        return num(s.sd, c.precision);
      case 2:
        return num(s.min, c.precision) + "--" + num(s.max, c.precision);
      default:
        return std::to_string(s.n);
    }
  };

  constexpr int kLabel = 10;
  std::vector<std::size_t> width;
  for (const auto& c : columns) {
    std::size_t w = c.title.size();
    for (int row = 0; row < 4; ++row) w = std::max(w, cell(c, row).size());
    width.push_back(w);
  }

  std::ostringstream os;
  os << std::left << std::setw(kLabel) << "";
  for (std::size_t i = 0; i < columns.size(); ++i) os << " | " << std::setw(static_cast<int>(width[i])) << columns[i].title;
  os << "\n";
  const std::array<const char*, 4> labels{"Mean", "St. Dev.", "Range", "n"};
  for (int row = 0; row < 4; ++row) {
    os << std::left << std::setw(kLabel) << labels[static_cast<std::size_t>(row)];
    for (std::size_t i = 0; i < columns.size(); ++i) {
      os << " | " << std::setw(static_cast<int>(width[i])) << cell(columns[i], row);
    }
    os << "\n";
  }
  os << "\nMorphology counts (total " << stats.total << "):\n";
  for (const auto& [m, n] : stats.counts) {
    os << "  " << std::setw(6) << to_string(m) << std::right << std::setw(8) << n << "  ("
       << num(100.0 * static_cast<double>(n) / static_cast<double>(stats.total), 2) << "%)\n"
       << std::left;
  }
  os << "Depth histogram:\n";
  for (const auto& [depth, n] : stats.depth_histogram) {
    os << "  depth " << depth << std::right << std::setw(8) << n << "\n" << std::left;
  }
  return os.str();
}

Mvl embed_swelling_solution(Mvl mvl, const std::map<SpeciesId, double>& concentrations_mM,
                            const SpeciesTable& species, Mode mode) {
  if (mode != Mode::Kinetic) throw ModeError("swelling-solution embedding needs kinetic mode");
  for (const auto& [id, conc] : concentrations_mM) {
    if (id.index >= species.size()) throw UnknownIdError("unknown species in swelling solution");
    if (!(conc >= 0.0) || !std::isfinite(conc)) {
      throw InvalidArgument("swelling concentration of '" + species[id].name + "' must be >= 0");
    }
  }
  for_each_compartment(mvl.root, [&](Compartment& c) {
    for (const auto& [id, conc] : concentrations_mM) {
      if (species[id].perm_class == PermClass::Particle && c.depth > 1) continue;
      c.contents.set(id, conc * c.volume);
    }
  });
  return mvl;
}

}  // namespace liposim
