#pragma once

#include <cstdint>
#include <string>

#include "wola/aggregators.hpp"

namespace wola {

/// Seeded random bucketing with bucket size s = floor(n / (2f)). When
/// s <= 1 the transform has no effect and the input is returned unchanged.
/// Otherwise a random permutation is cut into consecutive buckets of size s
/// (the last may be smaller), each replaced by its mean; declared_f is left
/// untouched. f must be >= 1 (pass the update set through directly for the
/// no-defense baseline).
UpdateSet pre_bucketing(const UpdateSet& u, int f, std::uint64_t seed);

/// Nearest-neighbor mixing: each row becomes the mean of its n - declared_f
/// closest rows (itself included; distance ties resolved by row index).
UpdateSet pre_nnm(const UpdateSet& u);

/// Synthetic-update injection: scores each row by its distance to the
/// nearer of the coordinate-wise extremes, then appends m copies of the
/// highest-scoring row (ties to the lowest index). The original rows are
/// preserved verbatim as a prefix.
UpdateSet pre_foundationfl(const UpdateSet& u, int m);

/// Dispatch by name: "none" | "bucketing" | "nnm" | "foundationfl".
/// `f` seeds the bucketing rule; `m` is the foundationfl replication count
/// (m <= 0 selects the n/2 default). `seed` feeds bucketing only.
UpdateSet preaggregate(const std::string& name, const UpdateSet& u, int f, int m,
                       std::uint64_t seed);

bool is_known_preaggregator(const std::string& name);

}  // namespace wola
