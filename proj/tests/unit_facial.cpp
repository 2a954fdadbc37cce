#include <cmath>
#include <random>
#include <variant>

#include "ramana/facial.hpp"
#include "test_common.hpp"

using namespace ramana;

namespace {

void gordan_examples() {
  const SdpInstance ex1 = testutil::ex1_instance();
  {
    // At full order the alternative is a reducing certificate: the only
    // Y with <A_1,Y> = <B,Y> = 0, tr Y = 1 and Y psd is diag(0,1).
    const GordanOutcome out = gordan_pair(ex1, 2);
    REQUIRE(std::holds_alternative<GordanZero>(out),
            "ex1 at s = 2 must expose a smaller face");
    const SymMat& y = std::get<GordanZero>(out).y;
    REQUIRE_NEAR(y(1, 1), 1.0, 1e-8, "certificate concentrates on (1,1)");
    REQUIRE(std::abs(y(0, 0)) <= 1e-8 && std::abs(y(0, 1)) <= 1e-8,
            "certificate vanishes off (1,1)");
  }
  {
    // After reduction the face has a Slater point, so the margin is
    // strictly positive (capped at 1).
    const FacialReductionResult fr = facial_reduction(ex1);
    const GordanOutcome out = gordan_pair(fr.reduced, fr.cert.face_rank);
    REQUIRE(std::holds_alternative<GordanPositive>(out),
            "reduced ex1 must report a positive margin");
    const GordanPositive& pos = std::get<GordanPositive>(out);
    REQUIRE(pos.t > 1e-6 && pos.t <= 1.0 + 1e-9,
            "margin must be positive and capped, got " << pos.t);
    // The maximizer certifies itself: slack minus t on the face stays psd.
    SymMat probe = fr.reduced.B - apply_operator(fr.reduced, pos.x);
    for (int i = 0; i < fr.cert.face_rank; ++i) probe.add(i, i, -pos.t);
    REQUIRE(psd_check(probe, 1e-6).psd, "Gordan maximizer fails its slack");
  }
  {
    const SdpInstance ex4 = testutil::ex4_instance();
    const GordanOutcome out = gordan_pair(ex4, 4);
    REQUIRE(std::holds_alternative<GordanZero>(out),
            "ex4 at s = 4 must expose a smaller face");
    const SymMat& y = std::get<GordanZero>(out).y;
    REQUIRE_NEAR(y(3, 3), 1.0, 1e-8, "first ex4 certificate is e44");
    double off = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j)
        if (!(i == 3 && j == 3)) off = std::max(off, std::abs(y(i, j)));
    REQUIRE(off <= 1e-8, "first ex4 certificate clean off (3,3), got " << off);
  }
}

void reduce_step_examples() {
  const SdpInstance ex1 = testutil::ex1_instance();
  SymMat y(2);
  y.set(1, 1, 1.0);
  const ReduceStep step = reduce_step(ex1, 2, y);
  REQUIRE(step.rank == 1, "diag(0,1) certificate has rank 1");
  REQUIRE_NEAR(step.cert(1, 1), 1.0, 1e-10, "cleaned certificate is 0 (+) I");
  REQUIRE(std::abs(step.cert(0, 0)) <= 1e-12 &&
              std::abs(step.cert(0, 1)) <= 1e-12,
          "cleaned certificate zero block");
  // The stored instance is the rescaling of the input by the stored T.
  const SdpInstance redone = rescale(ex1, step.transform);
  double dev = (redone.B - step.inst.B).max_abs();
  dev = std::max(dev, (redone.A[0] - step.inst.A[0]).max_abs());
  REQUIRE(dev <= 1e-12, "ReduceStep.inst must equal rescale(input, T)");

  const SdpInstance ex4 = testutil::ex4_instance();
  const GordanOutcome out = gordan_pair(ex4, 4);
  const ReduceStep s4 = reduce_step(ex4, 4, std::get<GordanZero>(out).y);
  REQUIRE(s4.rank == 1, "first ex4 step eliminates one index");
  REQUIRE(s4.inst.n == 4, "order never changes, only the frame");
}

void reduction_ex1() {
  const FacialReductionResult fr = facial_reduction(testutil::ex1_instance());
  REQUIRE(fr.cert.face_rank == 1, "ex1 face rank 1");
  REQUIRE(fr.steps == 1, "ex1 needs one certificate");
  REQUIRE(fr.cert.block_sizes.size() == 1 && fr.cert.block_sizes[0] == 1,
          "ex1 block sizes [1]");
  REQUIRE(fr.slack_report.rank == 1, "max slack rank 1");
  REQUIRE(fr.slack_report.slater_margin > 1e-6,
          "reduced face must have a Slater point");
  // Certificate in the final frame: 0 (+) I pattern.
  REQUIRE(fr.cert.ys.size() == 1, "one stored certificate");
  REQUIRE_NEAR(fr.cert.ys[0](1, 1), 1.0, 1e-8, "ex1 certificate identity");
  const CertificateCheck chk =
      verify_certificate(testutil::ex1_instance(), fr.cert, 1e-6);
  REQUIRE(chk.valid, "ex1 certificate must verify: "
                         << (chk.failures.empty() ? "" : chk.failures[0]));
  REQUIRE(chk.max_pattern_residual <= 1e-8, "ex1 pattern residual");
  REQUIRE(chk.max_eq_residual <= 1e-8, "ex1 equation residual");
}

void reduction_ex4() {
  const SdpInstance ex4 = testutil::ex4_instance();
  const FacialReductionResult fr = facial_reduction(ex4);
  REQUIRE(fr.cert.face_rank == 2, "ex4 face rank 2");
  REQUIRE(fr.steps == 2, "ex4 needs two certificates");
  REQUIRE(fr.cert.block_sizes.size() == 2 && fr.cert.block_sizes[0] == 1 &&
              fr.cert.block_sizes[1] == 1,
          "ex4 block sizes [1,1]");
  REQUIRE(fr.slack_report.rank == 2, "ex4 max slack rank 2");
  const CertificateCheck chk = verify_certificate(ex4, fr.cert, 1e-6);
  REQUIRE(chk.valid, "ex4 certificate must verify: "
                         << (chk.failures.empty() ? "" : chk.failures[0]));

  // The normalized max-rank slack is I_r (+) 0 in the reduced frame.
  const SymMat& s = fr.slack_report.slack.S;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) {
      const double want = (i == j && i < 2) ? 1.0 : 0.0;
      REQUIRE(std::abs(s(i, j) - want) <= 1e-6,
              "reduced slack entry (" << i << "," << j << ") = " << s(i, j));
    }

  // Tampering with a forced-zero entry must break verification.
  FacialCertificate bad = fr.cert;
  bad.ys[0].add(0, 0, 1e-3);
  const CertificateCheck chk_bad = verify_certificate(ex4, bad, 1e-6);
  REQUIRE(!chk_bad.valid, "tampered certificate accepted");
  REQUIRE(chk_bad.max_pattern_residual >= 0.5e-3,
          "pattern residual must register the tampering");

  // Claiming a smaller face than the blocks support must fail too.
  FacialCertificate short_cert = fr.cert;
  short_cert.face_rank = 1;
  REQUIRE(!verify_certificate(ex4, short_cert, 1e-6).valid,
          "inconsistent face rank accepted");
}

void reduction_slater() {
  std::mt19937_64 rng(51);
  const SdpInstance inst = testutil::random_slater_instance(rng, 4, 2);
  const FacialReductionResult fr = facial_reduction(inst);
  REQUIRE(fr.cert.face_rank == 4, "Slater instance keeps the full cone");
  REQUIRE(fr.steps == 0, "no certificates needed");
  REQUIRE(fr.cert.ys.empty(), "certificate list empty");
  REQUIRE(fr.slack_report.rank == 4, "max slack has full rank");
  const CertificateCheck chk = verify_certificate(inst, fr.cert, 1e-6);
  REQUIRE(chk.valid, "empty certificate chain is vacuously valid");
}

void embedded_face_property() {
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 4);        // 3..6
    const int r = 1 + static_cast<int>(rng() % (n - 1));  // 1..n-1
    const int m = 1 + static_cast<int>(rng() % 3);
    const SdpInstance inst = testutil::embedded_face_instance(rng, n, r, m);
    const FacialReductionResult fr = facial_reduction(inst);
    REQUIRE(fr.cert.face_rank == r,
            "face rank must match the construction: got "
                << fr.cert.face_rank << ", want " << r << " (trial " << trial
                << ")");
    int total = 0;
    for (int bs : fr.cert.block_sizes) {
      REQUIRE(bs >= 1, "every step must eliminate at least one index");
      total += bs;
    }
    REQUIRE(total == n - r, "block sizes must sum to n - r");
    REQUIRE(fr.steps <= n, "the loop terminates within n rounds");
    const CertificateCheck chk = verify_certificate(inst, fr.cert, 1e-6);
    REQUIRE(chk.valid, "synthetic certificate must verify (trial "
                           << trial << "): "
                           << (chk.failures.empty() ? "" : chk.failures[0]));

    // Every certificate annihilates every slack: with both sides in the
    // reduced frame, <S(x), Y_i> vanishes for any feasible x.
    const Vec x0(inst.m, 0.0);
    const auto sl = slack_of(fr.reduced, x0, 1e-7);
    REQUIRE(std::holds_alternative<Slack>(sl), "origin stays feasible");
    for (const SymMat& yc : fr.cert.ys)
      REQUIRE(std::abs(inner_product(std::get<Slack>(sl).S, yc)) <= 1e-6,
              "certificate fails to annihilate a slack (trial " << trial
                                                                << ")");

    // The found face is invariant under a change of frame.
    const RescalingTransform t = RescalingTransform::from(
        testutil::random_invertible(rng, n, 100.0), "probe");
    const FacialReductionResult fr2 = facial_reduction(rescale(inst, t));
    REQUIRE(fr2.cert.face_rank == r,
            "face rank must be frame invariant (trial " << trial << ")");
  }
}

}  // namespace

int main() {
  gordan_examples();
  reduce_step_examples();
  reduction_ex1();
  reduction_ex4();
  reduction_slater();
  embedded_face_property();
  std::cout << "unit_facial: all checks passed\n";
  return 0;
}
