#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "chronoscope/gravity.hpp"
#include "chronoscope/metrics.hpp"
#include "chronoscope/snapshot.hpp"

namespace chronoscope::synth {

// Platform-independent variates on top of std::mt19937_64, whose output
// sequence is fixed by the standard. The std:: distributions are not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller; draws two uniforms per call.
  double normal();

 private:
  std::mt19937_64 engine_;
};

struct PlantedPartition {
  std::size_t groups = 2;
  double p_intra = 0.0;
  double p_inter = 0.0;
};

struct SynthSpec {
  std::uint64_t seed = 1;
  std::size_t n_nodes = 2;
  double planted_exponent = 0.0;
  std::optional<PlantedPartition> planted_partition;
  double noise_scale = 0.0;
  int year = 2010;
};

/// Throws InvalidSpec unless the invariants hold.
void validate(const SynthSpec& spec);

/// Sorted, zero-padded synthetic third-level domains ("u0001.ac.uk", ...).
std::vector<std::string> node_names(std::size_t n);

struct BoundingBox {
  double lat_min = 50.0;
  double lat_max = 58.5;
  double lon_min = -5.5;
  double lon_max = 1.8;
};

enum class Layout {
  // Golden-angle lattice over the whole sphere. Every point sees nearly the
  // same distance distribution, so the per-node normalization factors are
  // close to constant and a planted exponent survives sigma unchanged.
  FibonacciSphere,
  // Uniform in a bounding box (UK-sized by default). Edge-of-region nodes
  // have smaller strength sums, which flattens the fitted exponent.
  UniformBox,
};

Layout parse_layout(std::string_view name);

/// Points for node_names(n). FibonacciSphere ignores the seed and the box.
GeoTable gen_geo_points(std::uint64_t seed, std::size_t n, Layout layout = Layout::FibonacciSphere,
                        const BoundingBox& box = {});

/// Complete weighted digraph on the first n_nodes entries of `geo` with
/// gravity-model weights S_ij = K d_ij^-a exp(noise_scale * z_ij), z ~ N(0, 1),
/// rounded to integers. K makes the lightest edge carry at least 1000 links.
/// On a homogeneous layout sigma_ij is then proportional to d^-a times the
/// same lognormal noise.
YearSnapshot gen_gravity_graph(const SynthSpec& spec, const GeoTable& geo);

/// Directed edges sampled independently: p_intra inside a planted group,
/// p_inter across. Weights are max(1, round(exp(noise_scale * z))).
YearSnapshot gen_partitioned_graph(const SynthSpec& spec);

/// Group labels ("g0", "g1", ...) of the planted partition; contiguous blocks
/// of node_names(n_nodes).
Partition planted_partition(const SynthSpec& spec);

}  // namespace chronoscope::synth
