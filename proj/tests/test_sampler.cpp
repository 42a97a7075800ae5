#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "confound/sampler.hpp"
#include "testutil.hpp"

using namespace confound;
using Catch::Matchers::WithinAbs;

TEST_CASE("biased cell sizes") {
  auto c = biased_cell_sizes(20, 0.5);
  CHECK(c.lo == 10);
  CHECK(c.hi == 30);
  c = biased_cell_sizes(20, 0.0);
  CHECK(c.lo == 20);
  CHECK(c.hi == 20);
  c = biased_cell_sizes(20, 1.0);
  CHECK(c.lo == 0);
  CHECK(c.hi == 40);
  // rounding is half-up on the under-represented size
  c = biased_cell_sizes(10, 0.25);  // 7.5 -> 8
  CHECK(c.lo == 8);
  CHECK(c.hi == 12);
  c = biased_cell_sizes(10, 0.35);  // 6.5 -> 7
  CHECK(c.lo == 7);
  CHECK(c.hi == 13);
  CHECK_THROWS_AS(biased_cell_sizes(10, 1.5), Error);
  CHECK_THROWS_AS(biased_cell_sizes(10, -0.1), Error);
}

TEST_CASE("bias grid construction") {
  const BiasGrid g = make_bias_grid(100, 40);
  CHECK(g.numerators == std::vector<std::size_t>{0, 40, 80});
  CHECK_THAT(g.b_max(), WithinAbs(0.8, 1e-15));
  CHECK_THAT(g.correction_divisor(), WithinAbs(0.6, 1e-15));

  const BiasGrid full = make_bias_grid(100, 20);
  CHECK(full.size() == 6);
  CHECK_THAT(full.b_max(), WithinAbs(1.0, 1e-15));
  CHECK_THAT(full.correction_divisor(), WithinAbs(0.9, 1e-15));

  const BiasGrid odd = make_bias_grid(100, 33);
  CHECK(odd.numerators == std::vector<std::size_t>{0, 33, 66, 99});
  CHECK_THAT(odd.correction_divisor(), WithinAbs(0.99 - 0.165, 1e-15));

  CHECK_THROWS_AS(make_bias_grid(100, 0), Error);
  CHECK_THROWS_AS(make_bias_grid(100, 101), Error);
}

TEST_CASE("role to cell mapping mirrors across orientations") {
  CHECK(role_cell(Role::pos_under, Orientation::phi) == Cell::pos_alpha);
  CHECK(role_cell(Role::pos_over, Orientation::phi) == Cell::pos_beta);
  CHECK(role_cell(Role::neg_over, Orientation::phi) == Cell::neg_alpha);
  CHECK(role_cell(Role::neg_under, Orientation::phi) == Cell::neg_beta);
  for (Role r : kAllRoles) {
    const Cell a = role_cell(r, Orientation::phi);
    const Cell b = role_cell(r, Orientation::phi_star);
    CHECK(cell_label(a) == cell_label(b));
    CHECK(cell_is_beta(a) != cell_is_beta(b));
  }
}

TEST_CASE("draws have the right composition and no duplicates") {
  const Dataset ds = testutil::grid_dataset(50);
  const CellPartition part = partition_cells(ds, 0.2, 7);  // 40 train, 10 held out per cell
  const BiasedDraw d = draw_biased(part, 20, 0.5, Orientation::phi, 5, 99);

  REQUIRE(d.train.size() == 80);  // 4N
  std::array<std::size_t, 4> per_cell{};
  std::set<const LabeledSample*> seen;
  for (const auto* s : d.train) {
    CHECK(seen.insert(s).second);
    per_cell[cell_index(cell_of(s->label, s->confounder == "b"))]++;
  }
  // phi orientation at b=0.5, N=20: alpha loses positives, gains negatives
  CHECK(per_cell[cell_index(Cell::pos_alpha)] == 10);
  CHECK(per_cell[cell_index(Cell::pos_beta)] == 30);
  CHECK(per_cell[cell_index(Cell::neg_alpha)] == 30);
  CHECK(per_cell[cell_index(Cell::neg_beta)] == 10);

  for (const auto* pool : {&d.val_pos_over, &d.val_neg_over, &d.val_pos_under,
                           &d.val_neg_under})
    CHECK(pool->size() == 5);
  CHECK(d.val_pos_over.front()->label == 1);
  CHECK(d.val_pos_over.front()->confounder == "b");
  CHECK(d.val_neg_over.front()->label == -1);
  CHECK(d.val_neg_over.front()->confounder == "a");
  CHECK(d.val_pos_under.front()->confounder == "a");

  // validation comes from held-out pools only
  std::set<const LabeledSample*> held;
  for (int i = 0; i < 4; ++i)
    held.insert(part.heldout[i].begin(), part.heldout[i].end());
  for (const auto* s : d.val_pos_over) CHECK(held.count(s) == 1);
  for (const auto* s : d.val_neg_under) CHECK(held.count(s) == 1);
}

TEST_CASE("the mirrored orientation swaps which level is inflated") {
  const Dataset ds = testutil::grid_dataset(50);
  const CellPartition part = partition_cells(ds, 0.2, 7);
  const BiasedDraw d = draw_biased(part, 20, 0.5, Orientation::phi_star, 5, 99);
  std::array<std::size_t, 4> per_cell{};
  for (const auto* s : d.train)
    per_cell[cell_index(cell_of(s->label, s->confounder == "b"))]++;
  CHECK(per_cell[cell_index(Cell::pos_alpha)] == 30);
  CHECK(per_cell[cell_index(Cell::pos_beta)] == 10);
  CHECK(per_cell[cell_index(Cell::neg_alpha)] == 10);
  CHECK(per_cell[cell_index(Cell::neg_beta)] == 30);
  CHECK(d.val_pos_over.front()->confounder == "a");
}

TEST_CASE("draws are deterministic in the seed") {
  const Dataset ds = testutil::grid_dataset(30);
  const CellPartition part = partition_cells(ds, 0.2, 3);
  const BiasedDraw a = draw_biased(part, 10, 0.3, Orientation::phi, 4, 5);
  const BiasedDraw b = draw_biased(part, 10, 0.3, Orientation::phi, 4, 5);
  const BiasedDraw c = draw_biased(part, 10, 0.3, Orientation::phi, 4, 6);
  CHECK(a.train == b.train);
  CHECK(a.val_pos_over == b.val_pos_over);
  CHECK(a.train != c.train);
}

TEST_CASE("oversized requests fail with the cell named") {
  const Dataset ds = testutil::grid_dataset(10);
  const CellPartition part = partition_cells(ds, 0.2, 3);  // 8 train, 2 held out
  CHECK_THROWS_WITH(draw_biased(part, 5, 1.0, Orientation::phi, 2, 0),
                    Catch::Matchers::ContainsSubstring("need 10, have 8"));
  CHECK_THROWS_WITH(draw_biased(part, 4, 0.0, Orientation::phi, 3, 0),
                    Catch::Matchers::ContainsSubstring("held-out"));
}
