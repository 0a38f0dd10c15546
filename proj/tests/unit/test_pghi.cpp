#include "catch_amalgamated.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "tsm/errors.hpp"
#include "tsm/pghi.hpp"
#include "tsm/signals.hpp"
#include "tsm/stft.hpp"
#include "tsm/window.hpp"

using namespace tsm;
using Catch::Approx;

namespace
{
    constexpr double pi = std::numbers::pi;

    PropagationStep t(std::size_t m)
    {
        return { m, FrameTag::previous, m, Direction::time };
    }
    PropagationStep up(std::size_t m)
    {
        return { m, FrameTag::current, m + 1, Direction::freq_up };
    }
    PropagationStep down(std::size_t m)
    {
        return { m, FrameTag::current, m - 1, Direction::freq_down };
    }

    PropagationTrace run_layout(const std::vector<double>& prev, const std::vector<double>& cur)
    {
        const std::vector<double> zeros(prev.size(), 0.0);
        PghiState state = PghiState::initial(zeros, zeros, prev, 0.15, 0);
        return pghi_frame(state, cur, zeros, zeros, 1.0, 1.0, true).trace;
    }

    std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double lo, double hi)
    {
        std::uniform_real_distribution<double> u(lo, hi);
        std::vector<double> v(n);
        for (auto& x : v)
        {
            x = u(rng);
        }
        return v;
    }
}  // namespace

TEST_CASE("reference propagation layouts", "[pghi][trace]")
{
    const std::vector<double> a{ 1, 3, 8, 10, 8, 3, 1 };
    SECTION("a: single peak in both frames")
    {
        CHECK(run_layout(a, a) == PropagationTrace{ t(3), up(3), down(3), down(2), up(4) });
    }
    SECTION("b: peak moves up one bin")
    {
        CHECK(run_layout({ 3, 8, 10, 8, 3, 1, 1 }, a) == PropagationTrace{ t(2), t(1), t(3), up(3), up(4) });
    }
    SECTION("c: two islands separated by a negligible bin")
    {
        const std::vector<double> c{ 5, 10, 5, 1, 4, 8, 4 };
        CHECK(run_layout(c, c) == PropagationTrace{ t(1), up(1), down(1), t(5), up(5), down(5) });
    }
    SECTION("d: onset")
    {
        CHECK(run_layout(std::vector<double>(7, 3.0), std::vector<double>(7, 8.0)) ==
              PropagationTrace{ t(0), up(0), up(1), up(2), up(3), up(4), up(5) });
    }
    SECTION("e: decay")
    {
        CHECK(run_layout(std::vector<double>(7, 8.0), std::vector<double>(7, 3.0)) ==
              PropagationTrace{ t(0), t(1), t(2), t(3), t(4), t(5), t(6) });
    }
}

TEST_CASE("propagated phase values follow the trapezoid rule", "[pghi]")
{
    const std::vector<double> prev_phase{ 0.1, 0.2, 0.3 };
    const std::vector<double> prev_dt{ 0.01, 0.02, 0.03 };
    const std::vector<double> prev_mag{ 1.0, 5.0, 1.0 };
    PghiState state = PghiState::initial(prev_phase, prev_dt, prev_mag, 0.3, 0);
    const std::vector<double> mag{ 2.0, 4.0, 2.0 };
    const std::vector<double> dt{ 0.05, 0.04, 0.03 };
    const std::vector<double> df{ 0.2, 0.4, 0.6 };
    const auto r = pghi_frame(state, mag, dt, df, 10.0, 3.0, true);
    REQUIRE(r.trace == PropagationTrace{ t(1), up(1), down(1) });
    const double p1 = 0.2 + 5.0 * (0.02 + 0.04);
    CHECK(r.phase[1] == Approx(p1));
    CHECK(r.phase[2] == Approx(p1 + 1.5 * (0.4 + 0.6)));
    CHECK(r.phase[0] == Approx(p1 - 1.5 * (0.4 + 0.2)));
    CHECK(r.significant_bins == 3);
    // state advances to the new frame
    CHECK(state.prev_phase == r.phase);
    CHECK(state.prev_mag == mag);
    CHECK(state.prev_dt == dt);
}

TEST_CASE("silent frame gets only random phases", "[pghi]")
{
    const std::vector<double> zeros(16, 0.0);
    PghiState state = PghiState::initial(zeros, zeros, zeros, 1e-6, 9);
    const auto r = pghi_frame(state, zeros, zeros, zeros, 1.0, 1.0, true);
    CHECK(r.significant_bins == 0);
    CHECK(r.trace.empty());

    std::mt19937_64 rng(9);
    for (double p : r.phase)
    {
        CHECK(p == random_phase(rng));
        CHECK(p > -pi);
        CHECK(p <= pi);
    }
}

TEST_CASE("each significant bin is assigned exactly once", "[pghi][property]")
{
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 50; ++trial)
    {
        const std::size_t bins = 64;
        auto prev = random_vector(bins, rng, 0.0, 1.0);
        auto cur = random_vector(bins, rng, 0.0, 1.0);
        // carve out negligible bins
        for (std::size_t m = 0; m < bins; m += 5)
        {
            cur[m] = 0.0;
            prev[(m + 2) % bins] = 0.0;
        }
        const double tol = 0.05 + 0.01 * trial;
        PghiState state = PghiState::initial(random_vector(bins, rng, -pi, pi), random_vector(bins, rng, -1, 1),
                                             prev, tol, trial);
        const auto r = pghi_frame(state, cur, random_vector(bins, rng, -1, 1), random_vector(bins, rng, -1, 1),
                                  256.0, 2.0, true);
        const double max = std::max(*std::max_element(prev.begin(), prev.end()),
                                    *std::max_element(cur.begin(), cur.end()));
        std::set<std::size_t> significant;
        for (std::size_t m = 0; m < bins; ++m)
        {
            if (cur[m] > tol * max)
            {
                significant.insert(m);
            }
        }
        std::multiset<std::size_t> targets;
        std::set<std::size_t> assigned;
        for (const auto& step : r.trace)
        {
            targets.insert(step.target_bin);
            if (step.source_frame == FrameTag::current)
            {
                // frequency steps only start from bins already assigned in this frame
                REQUIRE(assigned.count(step.source_bin) == 1);
                REQUIRE((step.target_bin + 1 == step.source_bin || step.source_bin + 1 == step.target_bin));
            }
            assigned.insert(step.target_bin);
        }
        REQUIRE(r.significant_bins == significant.size());
        REQUIRE(targets.size() == significant.size());
        REQUIRE(std::set<std::size_t>(targets.begin(), targets.end()) == significant);
        for (double p : r.phase)
        {
            REQUIRE(std::isfinite(p));
        }
    }
}

TEST_CASE("heap pops in priority order", "[pghi][heap]")
{
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> key(0, 5);
    std::uniform_int_distribution<std::size_t> bin(0, 20);
    MagnitudeHeap heap;
    for (int i = 0; i < 200; ++i)
    {
        heap.push({ static_cast<double>(key(rng)), bin(rng), i % 2 ? FrameTag::current : FrameTag::previous });
        // heap property over the stored array
        const auto e = heap.entries();
        for (std::size_t k = 1; k < e.size(); ++k)
        {
            REQUIRE_FALSE(pops_before(e[k], e[(k - 1) / 2]));
        }
    }
    HeapEntry last = heap.pop();
    while (!heap.empty())
    {
        const HeapEntry next = heap.pop();
        REQUIRE_FALSE(pops_before(next, last));
        last = next;
    }
}

TEST_CASE("tie-break order", "[pghi][heap]")
{
    CHECK(pops_before({ 2.0, 5, FrameTag::current }, { 1.0, 0, FrameTag::previous }));
    CHECK(pops_before({ 1.0, 5, FrameTag::previous }, { 1.0, 0, FrameTag::current }));
    CHECK(pops_before({ 1.0, 2, FrameTag::current }, { 1.0, 3, FrameTag::current }));
    CHECK_FALSE(pops_before({ 1.0, 2, FrameTag::current }, { 1.0, 2, FrameTag::current }));
}

TEST_CASE("seed only affects negligible bins", "[pghi]")
{
    std::mt19937_64 rng(8);
    const std::size_t bins = 40;
    const auto prev_phase = random_vector(bins, rng, -pi, pi);
    const auto prev_dt = random_vector(bins, rng, -1, 1);
    const auto prev = random_vector(bins, rng, 0.5, 1.0);
    auto cur = random_vector(bins, rng, 0.5, 1.0);
    for (std::size_t m = 10; m < 15; ++m)
    {
        cur[m] = 0.0;
    }
    const auto dt = random_vector(bins, rng, -1, 1);
    const auto df = random_vector(bins, rng, -1, 1);

    const auto run = [&](std::uint64_t seed) {
        PghiState s = PghiState::initial(prev_phase, prev_dt, prev, 1e-3, seed);
        return pghi_frame(s, cur, dt, df, 100.0, 1.0).phase;
    };
    const auto a = run(1);
    const auto b = run(1);
    const auto c = run(2);
    CHECK(a == b);
    for (std::size_t m = 0; m < bins; ++m)
    {
        if (cur[m] == 0.0)
        {
            CHECK(a[m] != c[m]);
        }
        else
        {
            CHECK(a[m] == c[m]);
        }
    }
}

TEST_CASE("significant set shrinks as tolerance grows", "[pghi][property]")
{
    std::mt19937_64 rng(12);
    const std::size_t bins = 128;
    // magnitudes spread over six decades
    std::vector<double> prev(bins), cur(bins);
    std::uniform_real_distribution<double> expo(-6.0, 0.0);
    for (std::size_t m = 0; m < bins; ++m)
    {
        prev[m] = std::pow(10.0, expo(rng));
        cur[m] = std::pow(10.0, expo(rng));
    }
    const std::vector<double> zeros(bins, 0.0);
    std::size_t last = bins + 1;
    for (double tol : { 1e-7, 1e-5, 1e-3, 1e-2, 0.1, 0.5, 0.99 })
    {
        PghiState s = PghiState::initial(zeros, zeros, prev, tol, 0);
        const auto r = pghi_frame(s, cur, zeros, zeros, 1.0, 1.0);
        CHECK(r.significant_bins <= last);
        last = r.significant_bins;
    }
    CHECK(last <= 1);
}

TEST_CASE("two sinusoids form separate islands", "[pghi]")
{
    const Signal s = generate({ { Sinusoid{ 500.0, 1.0, 0.0 }, Sinusoid{ 5000.0, 1.0, 0.0 } }, 1.0, 44100 });
    const AnalysisConfig cfg{ hann_window(4092), 8192, 512, 1024 };
    const auto frames = analyze(s, cfg);
    const double b_a = static_cast<double>(s.size()) / 8192;
    const GradientField g = gradient_field(frames.phase(), 512, 8192, b_a);
    std::vector<PropagationTrace> traces;
    const Grid<double> mag = frames.magnitude();
    const auto out = pghi_full(mag, g, frames.phase().frame(0), 1024.0, 2.0 * b_a, { 0.05, 0 }, &traces);
    REQUIRE(traces.size() == mag.frames());
    CHECK(traces[0].empty());
    CHECK(out.frame(0).size() == mag.bins());
    const std::size_t n = mag.frames() / 2;
    std::size_t times = 0;
    for (const auto& step : traces[n])
    {
        times += step.direction == Direction::time;
    }
    CHECK(times == 2);
}

TEST_CASE("streaming matches the offline grid", "[pghi]")
{
    const Signal s = generate(mixture_spec(1.0));
    const std::size_t a_a = 683;
    const AnalysisConfig cfg{ hann_window(4092), 8192, a_a, 1024 };
    const auto frames = analyze(s, cfg);
    const Grid<double> mag = frames.magnitude();
    const Grid<double> phase = frames.phase();
    const double b_a = static_cast<double>(s.size()) / 8192;
    const double b_s = 1024.0 / a_a * b_a;
    const PghiOptions options{ 1e-6, 77 };
    const Grid<double> offline =
        pghi_full(mag, gradient_field(phase, a_a, 8192, b_a), phase.frame(0), 1024.0, b_s, options);

    PghiStream stream({ 8192, a_a, b_a, 1024.0, b_s, options, DiffScheme::centered });
    std::vector<std::vector<double>> online;
    for (std::size_t n = 0; n < mag.frames(); ++n)
    {
        if (auto out = stream.push(mag.frame(n), phase.frame(n)))
        {
            online.push_back(std::move(*out));
        }
    }
    if (auto out = stream.flush())
    {
        online.push_back(std::move(*out));
    }
    CHECK_FALSE(stream.flush().has_value());
    REQUIRE(online.size() == mag.frames());
    CHECK(stream.frames_out() == mag.frames());
    for (std::size_t n = 0; n < mag.frames(); ++n)
    {
        const auto expect = offline.frame(n);
        REQUIRE(std::equal(expect.begin(), expect.end(), online[n].begin(), online[n].end()));
    }
}

TEST_CASE("invalid inputs are rejected", "[pghi][errors]")
{
    const std::vector<double> v(4, 1.0);
    const std::vector<double> w(3, 1.0);
    CHECK_THROWS_AS(PghiState::initial(v, v, v, 0.0, 0), ParameterError);
    PghiState s = PghiState::initial(v, v, v, 1e-6, 0);
    CHECK_THROWS_AS(pghi_frame(s, w, v, v, 1.0, 1.0), ParameterError);
    CHECK_THROWS_AS(pghi_frame(s, v, v, v, 0.0, 1.0), ParameterError);
    CHECK_THROWS_AS(PghiStream({ 8192, 0, 1.0, 1024.0, 1.0, {}, DiffScheme::centered }), ParameterError);
}

TEST_CASE("direction names", "[pghi]")
{
    CHECK(std::string(to_string(Direction::time)) == "time");
    CHECK(std::string(to_string(Direction::freq_up)) == "freq_up");
    CHECK(std::string(to_string(Direction::freq_down)) == "freq_down");
}
