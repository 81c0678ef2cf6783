#pragma once

#include <optional>
#include <utility>

#include "dyadic/exact.hpp"
#include "dyadic/grids.hpp"
#include "dyadic/report.hpp"

namespace dyadic {

/// [left, left + length) with exact endpoints. On the torus the arc may wrap;
/// on the line it need not lie inside the sampled window.
struct ArbitraryInterval {
  ExactRational left;
  ExactRational length;
  Domain domain;

  ExactRational right() const { return left + length; }
};

struct Cover {
  IntervalId id;
  ExactRational ratio;  // |I| / |Q|
};

/// Smallest-scale interval of the standard or shifted grid containing q, with
/// |I| <= (2 / d(delta)) |Q|. Ties go to the standard grid. On the torus a q
/// with |q| >= d(delta) is covered by the whole circle.
Cover cover(const ArbitraryInterval& q, const Shift& shift);
Cover cover(const ArbitraryInterval& q, const ExactRational& delta);

/// Largest standard or shifted grid interval inside q; ratio is |I'| / |Q| and
/// is at least d(delta) / 4. Throws DomainError when nothing of length >= 2^-L fits.
Cover inner(const ArbitraryInterval& q, const Shift& shift);
Cover inner(const ArbitraryInterval& q, const ExactRational& delta);

/// Two adjacent standard intervals J1, J2 of equal length with k inside their
/// union and |J1| / 2 < |k| <= |J1|. Line domain only.
std::pair<IntervalId, IntervalId> two_dyadic_cover(const ArbitraryInterval& k);

/// Searches the standard grid and the plain translate by delta (no large-scale
/// corrections) from fine to coarse, down to level -max_level_drop, for the
/// smallest interval containing q. Line domain only.
std::optional<Cover> cover_naive(const ArbitraryInterval& q, const ExactRational& delta, int max_level_drop);

/// Every mesh-aligned arc Q of the torus: Q inside cover(Q) and
/// |I| <= C(delta) |Q|, both decided in exact arithmetic.
VerificationReport verify_cover_exhaustive(const Domain& torus, const ExactRational& delta);

/// Every mesh-aligned Q of the line window with 0 and delta interior and
/// |Q| <= 2^M: cover succeeds with ratio <= C(delta), and cover_naive finds
/// nothing down to level -M.
VerificationReport verify_shift_necessity(const Domain& line, const ExactRational& delta);

/// For n_min <= n <= n_max, the smallest gap between level-n endpoints of the
/// standard and shifted grids is at least d(delta) 2^-n (exact). Both sets
/// are 2^-n periodic, so a window of a few periods is scanned.
VerificationReport verify_separation(const ExactRational& delta, int n_min, int n_max);

}  // namespace dyadic
