#pragma once

// Stochastic MVL populations calibrated to measured electroformation
// statistics: morphology prevalence, outer size, internal liposome count.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "liposim/random.hpp"
#include "liposim/truncated.hpp"
#include "liposim/types.hpp"

namespace liposim {

struct FractionRange {
  double low = 0.0;
  double high = 0.0;
  bool operator==(const FractionRange&) const = default;
};

struct CountRange {
  int low = 0;
  int high = 0;
  bool operator==(const CountRange&) const = default;
};

// Children are placed until their volumes use at most this share of the
// parent volume.
inline constexpr double kPackingHeadroom = 0.9;
inline constexpr int kMaxPackingAttempts = 100;

struct GeneratorParams {
  // Order: T1a, T1b, T2, T3.
  std::array<double, 4> type_prevalence{0.72, 0.12, 0.08, 0.08};
  // Outer diameter (um) of T1a, T1b and T2.
  TruncatedSpec outer_diameter{64.60, 40.19, 17.39, 173.50};
  // Maximal dimension (um) of amorphous T3.
  TruncatedSpec t3_diameter{127.81, 70.96, 69.97, 246.18};
  // Direct children of a non-T3 root; rounded to integers.
  TruncatedSpec internal_count{5.10, 3.15, 1.0, 14.0};
  // T3 contents were too numerous to count; uniform and unvalidated.
  CountRange t3_internal_count{15, 50};
  // Child diameter as a fraction of the parent diameter. Never measured.
  FractionRange child_diameter_fraction{0.10, 0.45};
  // T3 needs smaller children for 15-50 of them to pack.
  FractionRange t3_child_diameter_fraction{0.05, 0.25};
  // Applies to both diameter distributions; counts are always normal.
  DistributionFamily family = DistributionFamily::Normal;
  std::uint64_t seed = 0;

  // Throws InvalidArgument.
  void validate() const;

  bool operator==(const GeneratorParams&) const = default;
};

// Fitted distributions for one parameter set; reuse it for many samples.
class PopulationSampler {
 public:
  explicit PopulationSampler(GeneratorParams params);

  // Root id is `id`; children are "<id>.<j>", grandchildren "<id>.<j>.<k>".
  // Throws GenerationError when children cannot be packed.
  Mvl sample(Rng& rng, const std::string& id) const;

  const GeneratorParams& params() const { return params_; }
  const TruncatedDistribution& outer_diameter() const { return outer_; }
  const TruncatedDistribution& t3_diameter() const { return t3_; }
  const TruncatedDistribution& internal_count() const { return count_; }

 private:
  GeneratorParams params_;
  TruncatedDistribution outer_;
  TruncatedDistribution t3_;
  TruncatedDistribution count_;
};

Mvl sample_mvl(const GeneratorParams& params, Rng& rng, const std::string& id = "m0");

// Item i is sampled from derive_stream(seed, i) with root id "m<i>".
// `jobs` > 1 splits the batch over threads; the result is identical.
std::vector<Mvl> sample_population(const GeneratorParams& params, std::size_t n, std::uint64_t seed,
                                   unsigned jobs = 1);

struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation; 0 for n == 1
  double min = 0.0;
  double max = 0.0;
};

std::optional<Summary> summarize(std::span<const double> values);

struct PopulationStats {
  std::size_t total = 0;
  std::map<Morphology, std::size_t> counts;
  std::map<Morphology, Summary> diameter_by_type;
  std::map<Morphology, Summary> internal_count_by_type;
  // Grouped like the measured table: T1a, T1b and T2 together; T3 apart.
  std::optional<Summary> diameter_t12;
  std::optional<Summary> diameter_t3;
  std::optional<Summary> internal_count_t12;
  // Nesting depth (tree height) -> number of MVLs.
  std::map<int, std::size_t> depth_histogram;
};

// Internal count is the number of direct children of the root. Lysed
// husks are skipped. Throws InvalidArgument for an empty population.
PopulationStats population_stats(std::span<const Mvl> population);

// Aligned text table: Mean / St. Dev. / Range / n rows for the three
// measured columns, then per-type counts and the depth histogram.
std::string format_stats_table(const PopulationStats& stats);

// Sets every non-particle species to the given concentration (mM) in every
// compartment; particle species only reach the outermost compartment.
// Idempotent. Throws ModeError in abstract mode, UnknownIdError for a
// species outside the table, InvalidArgument for negative concentrations.
Mvl embed_swelling_solution(Mvl mvl, const std::map<SpeciesId, double>& concentrations_mM,
                            const SpeciesTable& species, Mode mode);

}  // namespace liposim
