#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace liposim {

enum class Mode { Abstract, Kinetic };

enum class PermClass { Gas, SmallPolar, Lipophilic, Ionic, Macromolecule, Particle };
inline constexpr std::size_t kPermClassCount = 6;

// Plain is a single liposome with no inner compartments; it only appears
// after lysis or bursting liberates an inner compartment.
enum class Morphology { T1a, T1b, T2, T3, Plain };

enum class Target { Here, Out, In };

enum class EventKind { Burst, DcLysis, ElectroporationOpen, ElectroporationClose, Halt, Injection };

std::string_view to_string(Mode mode);
std::string_view to_string(PermClass cls);
std::string_view to_string(Morphology morphology);
std::string_view to_string(Target target);
std::string_view to_string(EventKind kind);

std::optional<Mode> parse_mode(std::string_view text);
std::optional<PermClass> parse_perm_class(std::string_view text);
std::optional<Morphology> parse_morphology(std::string_view text);
std::optional<Target> parse_target(std::string_view text);
std::optional<EventKind> parse_event_kind(std::string_view text);

struct SpeciesId {
  std::uint32_t index = 0;
  auto operator<=>(const SpeciesId&) const = default;
};

}  // namespace liposim
