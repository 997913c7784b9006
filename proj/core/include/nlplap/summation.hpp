#pragma once

namespace nlplap {

// Kahan-compensated accumulator. All scalar reductions in the library run
// through this in a fixed sequential order so results are reproducible
// run to run and independent of the thread count used during assembly.
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

}  // namespace nlplap
