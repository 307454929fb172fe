#pragma once

// Shared test subshifts and potentials.

#include "sofic/potential.hpp"
#include "sofic/presentation.hpp"
#include "sofic/sft.hpp"

namespace fixtures {

using namespace sofic;

inline Alphabet binary() { return Alphabet({"0", "1"}); }

// Full shift on {0,1}: one vertex, both loops.
inline SoficPresentation full_shift() {
    return SoficPresentation::from_graph(binary(), {"q"},
                                         {{0, 0, 0}, {0, 1, 0}});
}

// Golden-mean shift (no factor 11), compiled from its forbidden word.
inline SoficPresentation golden_mean() {
    return SoficPresentation::from_forbidden(binary(), {Word::of({1, 1})});
}

// Golden-mean shift on its letter graph (vertex = last letter read).
inline SoficPresentation golden_letter_graph() {
    return SoficPresentation::from_graph(binary(), {"0", "1"},
                                         {{0, 0, 0}, {0, 1, 1}, {1, 0, 0}});
}

// Even shift: runs of 0 between 1s have even length.
inline SoficPresentation even_shift() {
    return SoficPresentation::from_graph(binary(), {"e", "o"},
                                         {{0, 1, 0}, {0, 0, 1}, {1, 0, 0}});
}

inline Potential zero_potential() { return Potential::zero(binary()); }

inline Potential bernoulli_13_23() {
    return Potential::log_bernoulli(binary(), {1.0 / 3.0, 2.0 / 3.0});
}

inline Potential bernoulli_half() {
    return Potential::log_bernoulli(binary(), {0.5, 0.5});
}

// Range-2 table with declared envelope var_m <= 1 * (1/2)^m; the table
// spread keeps the declaration valid.
inline Potential holder_c1_t05() {
    // order of table entries: 00, 01, 10, 11
    return Potential(binary(), 2, {0.0, -0.3, 0.4, 0.4},
                     Variation::exponential(1.0, 0.5));
}

}  // namespace fixtures
