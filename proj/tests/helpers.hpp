#pragma once

#include "refugium/mesh.hpp"
#include "refugium/params.hpp"

#include <random>

namespace testing {

inline refugium::DomainSpec line(int n, double lo = 0.25, double hi = 0.75) {
  refugium::DomainSpec d;
  d.dimension = 1;
  d.lx = 1.0;
  d.resolution = n;
  d.zone = std::array<refugium::Interval, 2>{refugium::Interval{lo, hi}, refugium::Interval{0.0, 0.0}};
  return d;
}

inline refugium::DomainSpec bare_line(int n) {
  refugium::DomainSpec d = line(n);
  d.zone.reset();
  return d;
}

inline refugium::DomainSpec square(int n) {
  refugium::DomainSpec d;
  d.dimension = 2;
  d.lx = 1.0;
  d.ly = 1.0;
  d.resolution = n;
  d.zone = std::array<refugium::Interval, 2>{refugium::Interval{0.25, 0.75}, refugium::Interval{0.25, 0.75}};
  return d;
}

inline refugium::ParamSet base() {
  refugium::ParamSet p;
  p.a = 2.0;
  p.k = 1.0;
  p.c = 1.0;
  p.m = 1.0;
  p.mu = 1.0;
  p.theta = 1.0;
  return p;
}

inline refugium::Field random_field(int n, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  refugium::Field f(n);
  for (int i = 0; i < n; ++i) f[i] = dist(rng);
  return f;
}

}  // namespace testing
