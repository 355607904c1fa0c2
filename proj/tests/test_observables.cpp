#include "aahdiss/observables.hpp"

#include <catch_amalgamated.hpp>

using namespace aahdiss;
using Catch::Approx;

TEST_CASE("transport observables of simple states", "[observables]") {
    const DensityMatrix local = site_projector(5, 3);
    const auto s = transport_observables(local, 3);
    CHECK(s.sigma == 0.0);
    CHECK(s.ppr == Approx(1.0));
    CHECK(s.l1 == 0.0);

    DensityMatrix pure = DensityMatrix::Constant(5, 5, cplx{0.2});
    const auto u = transport_observables(pure, 3);
    CHECK(u.sigma == Approx(std::sqrt((4 + 1 + 0 + 1 + 4) / 5.0)));
    CHECK(u.ppr == Approx(5.0));
    CHECK(u.l1 == Approx(4.0));
}

TEST_CASE("power-law fit recovers exact laws", "[observables]") {
    std::vector<double> t, y;
    for (int i = 0; i < 50; ++i) {
        t.push_back(0.1 * std::pow(1.2, i));
        y.push_back(0.135 * std::pow(t.back(), 0.4));
    }
    const auto f = power_law_fit(t, y, 1.0, 100.0);
    CHECK(f.alpha == Approx(0.4).epsilon(1e-12));
    CHECK(f.D == Approx(0.135).epsilon(1e-12));
    CHECK(f.residual < 1e-12);
}

TEST_CASE("rescaling time maps D to D Γ^α and keeps α", "[observables]") {
    std::vector<double> t, y;
    for (int i = 0; i < 80; ++i) {
        t.push_back(0.01 * std::pow(1.15, i));
        y.push_back(2.0 * std::pow(t.back(), 0.7) * (1.0 + 0.05 * std::sin(i)));
    }
    const BathSpec b{2.0, 5.0, 0.0};
    const double rate = effective_rate(b, 10.0);
    const auto tt = rescale_time(t, b, 10.0);
    const auto f = power_law_fit(t, y, 0.1, 10.0);
    const auto g = power_law_fit(tt, y, 0.1 * rate, 10.0 * rate);
    CHECK(g.alpha == Approx(f.alpha).epsilon(1e-10));
    CHECK(f.D == Approx(g.D * std::pow(rate, f.alpha)).epsilon(1e-10));
}

TEST_CASE("fit window errors", "[observables]") {
    std::vector<double> t{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}, y(11, 1.0);
    CHECK_THROWS_AS(power_law_fit(t, y, 100.0, 200.0), std::invalid_argument);
    CHECK_THROWS_AS(power_law_fit(t, y, 1.0, 5.0), std::invalid_argument);
    y[3] = 0.0;
    CHECK_THROWS_AS(power_law_fit(t, y, 1.0, 11.0), std::invalid_argument);
}

TEST_CASE("moving average", "[observables]") {
    const std::vector<double> y{1, 2, 3, 4, 5, 6, 7};
    const auto m = moving_average(y, 5);
    CHECK(m == std::vector<double>{1, 2, 3, 4, 5, 6, 7});
    const std::vector<double> z{0, 10, 0, 10, 0};
    const auto n = moving_average(z, 3);
    CHECK(n[0] == 0.0);
    CHECK(n[1] == Approx(10.0 / 3.0));
    CHECK(n[2] == Approx(20.0 / 3.0));
    CHECK(moving_average(z, 1) == z);
    CHECK_THROWS_AS(moving_average(z, 0), std::invalid_argument);
}

TEST_CASE("log-log interpolation", "[observables]") {
    const std::vector<double> t{1, 10, 100}, y{1, 10, 100};
    CHECK(loglog_interpolate(t, y, 31.6227766) == Approx(31.6227766));
    CHECK_THROWS_AS(loglog_interpolate(t, y, 1000.0), std::out_of_range);
}
