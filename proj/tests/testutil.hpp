#pragma once

#include <complex>
#include <random>

#include "linelab/linespace.hpp"

namespace linelab::testutil {

struct Rng {
    explicit Rng(uint64_t seed) : eng(seed) {}
    std::mt19937_64 eng;

    double uniform(double a, double b) {
        return std::uniform_real_distribution<double>(a, b)(eng);
    }
    double gauss(double sigma = 1.0) {
        return std::normal_distribution<double>(0.0, sigma)(eng);
    }
    Vec3 gauss_vec(double sigma = 1.0) {
        return Vec3(gauss(sigma), gauss(sigma), gauss(sigma));
    }
    Vec3 unit_vec() {
        Vec3 v;
        do {
            v = gauss_vec();
        } while (v.norm() < 1e-6);
        return v.normalized();
    }
    /// Unit vector outside the south polar cap (chart domain).
    Vec3 unit_vec_chart() {
        Vec3 u;
        do {
            u = unit_vec();
        } while (u.z() < -0.9);
        return u;
    }
    Vec3 tangent_at(const Vec3 &u, double sigma = 1.0) {
        const Vec3 g = gauss_vec(sigma);
        return g - g.dot(u) * u;
    }
    OrientedLine line(double moment_sigma = 1.0) {
        const Vec3 u = unit_vec();
        return OrientedLine(u, tangent_at(u, moment_sigma));
    }
    OrientedLine line_chart(double moment_sigma = 1.0) {
        const Vec3 u = unit_vec_chart();
        return OrientedLine(u, tangent_at(u, moment_sigma));
    }
    LineTangent tangent(const OrientedLine &l, double sigma = 1.0) {
        const Vec3 &u = l.direction();
        return LineTangent{l, tangent_at(u, sigma), tangent_at(u, sigma)};
    }
};

} // namespace linelab::testutil
