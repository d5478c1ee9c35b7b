#include "ensctrl/branch.hpp"

#include <algorithm>
#include <cmath>

namespace ensctrl {

namespace {

struct Run {
    int sign;
    int first_step;
    int last_step;
};

}  // namespace

BranchDecomposition decompose(const SampledField& a, double tol_mono) {
    if (!a.is_scalar()) throw std::invalid_argument("decompose expects a scalar field");
    const int n = a.grid_size();
    std::vector<double> v(n);
    for (int j = 0; j < n; ++j) v[j] = a.scalar(j);

    BranchDecomposition d;
    d.range_lo = *std::min_element(v.begin(), v.end());
    d.range_hi = *std::max_element(v.begin(), v.end());
    const double range = d.range_hi - d.range_lo;
    const double thr = tol_mono * range;

    std::vector<int> cls(n - 1);
    for (int j = 0; j + 1 < n; ++j) {
        const double dv = v[j + 1] - v[j];
        cls[j] = dv > thr ? 1 : (dv < -thr ? -1 : 0);
    }

    // A run of two or more near-constant steps means a flat segment, hence
    // infinitely many preimages there.
    int zero_run = 0;
    for (int c : cls) {
        zero_run = c == 0 ? zero_run + 1 : 0;
        if (zero_run >= 2) d.degenerate = true;
    }
    if (range == 0.0) d.degenerate = true;

    std::vector<Run> runs;
    for (int j = 0; j + 1 < n; ++j) {
        if (cls[j] == 0) continue;
        if (!runs.empty() && runs.back().sign == cls[j] && j - runs.back().last_step <= 2)
            runs.back().last_step = j;
        else
            runs.push_back({cls[j], j, j});
    }

    if (runs.empty()) {
        d.degenerate = true;
        d.branches.push_back({0, n - 1, 0});
        return d;
    }

    // Boundary node between adjacent opposite-sign runs: the extremum of the
    // candidate nodes spanning the gap.
    std::vector<int> boundaries;
    for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
        const int gap_first = runs[i].last_step + 1;       // node after run i
        const int gap_last = runs[i + 1].first_step;       // first node of run i+1
        int best = gap_first;
        for (int k = gap_first; k <= gap_last; ++k) {
            const bool want_max = runs[i].sign > 0;
            if ((want_max && v[k] > v[best]) || (!want_max && v[k] < v[best])) best = k;
        }
        boundaries.push_back(best);
    }

    int start = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const int end = i < boundaries.size() ? boundaries[i] : n - 1;
        d.branches.push_back({start, end, runs[i].sign});
        start = end;
    }
    return d;
}

Preimage preimage(const BranchDecomposition& d, const SampledField& a, double eta,
                  double tol_val, double tol_merge) {
    if (d.degenerate)
        throw BranchError("degenerate branch decomposition: drift is locally constant");
    const int n = a.grid_size();
    const double range = d.range_hi - d.range_lo;
    const double atol = tol_val * std::max(range, 1e-300);
    if (eta < d.range_lo - atol || eta > d.range_hi + atol) {
        Preimage empty;
        empty.eta = eta;
        return empty;
    }

    std::vector<double> candidates;
    for (const Branch& br : d.branches) {
        const double vf = a.scalar(br.first), vl = a.scalar(br.last);
        const double lo = std::min(vf, vl), hi = std::max(vf, vl);
        if (eta < lo - atol || eta > hi + atol) continue;
        const double target = std::min(std::max(eta, lo), hi);
        // Locate the bracketing cell of the interpolant inside this branch.
        double point = a.grid_point(br.last);
        for (int k = br.first; k < br.last; ++k) {
            const double v0 = a.scalar(k), v1 = a.scalar(k + 1);
            const double clo = std::min(v0, v1), chi = std::max(v0, v1);
            if (target < clo - atol || target > chi + atol) continue;
            if (v1 == v0) {
                point = 0.5 * (a.grid_point(k) + a.grid_point(k + 1));
            } else {
                const double t = std::min(std::max((target - v0) / (v1 - v0), 0.0), 1.0);
                point = a.grid_point(k) + t * a.spacing();
            }
            break;
        }
        candidates.push_back(point);
    }

    std::sort(candidates.begin(), candidates.end());
    Preimage p;
    p.eta = eta;
    for (double c : candidates) {
        if (!p.points.empty() && c - p.points.back() <= tol_merge)
            p.points.back() = 0.5 * (p.points.back() + c);
        else
            p.points.push_back(c);
    }
    (void)n;
    return p;
}

std::vector<double> junction_images(const BranchDecomposition& d, const SampledField& a) {
    std::vector<double> images;
    for (std::size_t i = 0; i + 1 < d.branches.size(); ++i)
        images.push_back(a.scalar(d.branches[i].last));
    return images;
}

}  // namespace ensctrl
