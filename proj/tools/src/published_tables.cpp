#include "hpmg/bench/experiments.hpp"

#include "hpmg/errors.hpp"

namespace hpmg::bench {

namespace {

// Rows: levels 2..5 (9x9 .. 243x243), columns: p = 2..6. -1 marks a missing entry.
using CycleGrid = int[4][5];

constexpr CycleGrid kLobattoUnprecSin = {{12, 24, 43, 63, 89}, {13, 23, 41, 61, 86}, {13, 22, 41, 61, 85},
                                         {13, 22, 41, 61, 85}};
constexpr CycleGrid kLobattoUnprecTwoPeak = {{19, 36, 59, 89, 125}, {18, 33, 55, 82, 116}, {17, 31, 52, 78, 111},
                                             {16, 30, 50, 75, 106}};
constexpr CycleGrid kLobattoPrecSin = {{11, 20, 32, 46, 62}, {9, 15, 25, 35, 47}, {7, 12, 19, 26, 35},
                                       {7, 9, 13, 18, 22}};
constexpr CycleGrid kLobattoPrecTwoPeak = {{16, 27, 43, 61, 82}, {12, 19, 29, 41, 55}, {9, 14, 21, 29, 39},
                                           {8, 10, 15, 20, 26}};
constexpr CycleGrid kLegendreUnprecTwoPeak = {{20, 37, 62, 92, 131}, {19, 34, 57, 85, 122}, {18, 33, 55, 82, 117},
                                              {17, 31, 53, 78, -1}};
constexpr CycleGrid kLegendrePrecTwoPeak = {{16, 27, 43, 61, 82}, {12, 19, 29, 41, 55}, {9, 13, 21, 29, 38},
                                            {8, 10, 15, 20, -1}};

// d = 2 then d = 3; per d: Vanilla, AuxiliaryFacets, AuxiliaryFacetsStandalone; p = 1..10.
constexpr std::int64_t kAccessCounts[2][3][10] = {
    {{36, 81, 144, 225, 324, 441, 576, 729, 900, 1089},
     {40, 69, 104, 145, 192, 245, 304, 369, 440, 517},
     {48, 87, 136, 195, 264, 343, 432, 531, 640, 759}},
    {{88, 297, 704, 1375, 2376, 3773, 5632, 8019, 11000, 14641},
     {108, 270, 528, 900, 1404, 2058, 2880, 3888, 5100, 6534},
     {124, 324, 656, 1150, 1836, 2744, 3904, 5346, 7100, 9196}}};

} // namespace

std::optional<int> published_cycle_count(ProblemKind problem, Criterion criterion, NodeKind basis, int level, int p) {
  if (level < 2 || level > 5 || p < 2 || p > 6) return std::nullopt;
  const CycleGrid* grid = nullptr;
  const bool prec = criterion == Criterion::Preconditioned;
  if (basis == NodeKind::GaussLobatto) {
    if (problem == ProblemKind::SinProduct) grid = prec ? &kLobattoPrecSin : &kLobattoUnprecSin;
    if (problem == ProblemKind::TwoPeak) grid = prec ? &kLobattoPrecTwoPeak : &kLobattoUnprecTwoPeak;
  } else if (problem == ProblemKind::TwoPeak) {
    grid = prec ? &kLegendrePrecTwoPeak : &kLegendreUnprecTwoPeak;
  }
  if (!grid) return std::nullopt;
  const int v = (*grid)[level - 2][p - 2];
  if (v < 0) return std::nullopt;
  return v;
}

std::int64_t published_access_count(AccessAlgorithm alg, int dim, int p) {
  if (dim < 2 || dim > 3 || p < 1 || p > 10) throw InvalidArgument("published_access_count: only d = 2, 3 and p = 1..10");
  const int a = alg == AccessAlgorithm::Vanilla ? 0 : alg == AccessAlgorithm::AuxiliaryFacets ? 1 : 2;
  return kAccessCounts[dim - 2][a][p - 1];
}

} // namespace hpmg::bench
