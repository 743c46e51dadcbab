#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "csdual/solver.hpp"

namespace csdual {

std::vector<SweepRow> sweep(const MixedModel& model_template, const std::vector<double>& beta_grid,
                            const std::vector<double>& h_grid, const SolveOptions& opt, int jobs) {
  const std::size_t nh = h_grid.size();
  const std::size_t cells = beta_grid.size() * nh;
  std::vector<SweepRow> rows(cells);
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t i = next++; i < cells; i = next++) {
      SweepRow& row = rows[i];
      row.beta = beta_grid[i / nh];
      row.h = h_grid[i % nh];
      try {
        const MixedModel m = model_template.scaled(row.beta * row.beta).with_field(row.h);
        SolveOptions o = opt;
        o.seed = opt.seed + i;
        const SolveReport rep = solve(m, o);
        row.F = rep.free_energy;
        row.gap = rep.certificate.gap;
        row.phase = rep.phase.str();
        row.n_atoms = rep.phase.atoms;
        row.n_segments = rep.phase.segments;
        row.status = rep.status == SolveStatus::Certified ? "certified" : "uncertified";
      } catch (const std::exception& e) {
        row.status = "error";
        row.error = e.what();
      }
    }
  };

  const int workers = std::clamp<int>(jobs, 1, static_cast<int>(std::max<std::size_t>(cells, 1)));
  std::vector<std::thread> pool;
  for (int k = 1; k < workers; ++k) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return rows;
}

}  // namespace csdual
