#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "fracsim/fracnum.hpp"

using namespace fracsim;

namespace {

// Independently computed reference values (high-precision arithmetic),
// frozen as decimal literals.
struct MlOracle {
  double a, b, nu, want;
};

constexpr MlOracle kMlTable[] = {
    {0.5, 0.5, -std::numbers::sqrt2, 0.08872532356402331775},
    {0.3, 0.3, -1.0, 0.0773167990300896759543},
    {0.3, 0.3, -3.0, 0.0172433164217441347654},
    {0.3, 0.3, -10.0, 0.00205178630322761507827},
    {0.3, 0.3, -100.0, 0.0000228419672142895107146},
    {0.3, 1.0, -1.0, 0.456594408329690669007},
    {0.3, 1.0, -3.0, 0.211802633196435780394},
    {0.3, 1.0, -10.0, 0.0726497290727720853563},
    {0.3, 1.0, -100.0, 0.00765885622228664138918},
    {0.5, 0.5, -2.0, 0.0533982309267447992179},
    {0.5, 0.5, -5.0, 0.010666394882413155097},
    {0.5, 0.5, -6.0, 0.00753017674452616061116},
    {0.5, 0.5, -7.0, 0.00558920324368575251903},
    {0.5, 0.5, -10.0, 0.00277965610953042837291},
    {0.5, 0.5, -30.0, 0.00031291770525374203432},
    {0.5, 0.5, -100.0, 0.0000282052488129965924338},
    {0.5, 1.0, -2.0, 0.255395676310505743865},
    {0.5, 1.0, -5.0, 0.11070463773306862637},
    {0.5, 1.0, -6.0, 0.0927765678005383543895},
    {0.5, 1.0, -7.0, 0.0798000543291529334899},
    {0.5, 1.0, -10.0, 0.0561409927438225858575},
    {0.5, 1.0, -30.0, 0.0187958888614167514971},
    {0.5, 1.0, -100.0, 0.00564161378298943290356},
    {0.5, 1.5, -1.0, 0.572416423844192995589},
    {0.5, 1.5, -4.0, 0.215750135593734652528},
    {0.5, 1.5, -50.0, 0.01977436927469352455},
    {0.8, 0.8, -1.0, 0.255743844758241870524},
    {0.8, 0.8, -5.0, 0.0118287297249945023146},
    {0.8, 0.8, -10.0, 0.0022770080856945369187},
    {0.8, 0.8, -20.0, 0.000495825209592086766045},
    {0.8, 0.8, -50.0, 0.0000733153138290553507369},
    {0.8, 1.0, -1.0, 0.386948578618976851465},
    {0.8, 1.0, -5.0, 0.0575953847621522537703},
    {0.8, 1.0, -10.0, 0.024902819761976537376},
    {0.8, 1.0, -20.0, 0.011617250451432780556},
    {0.8, 1.0, -50.0, 0.00446777615790299329564},
    {0.8, 1.0, -100.0, 0.00220567886850911125914},
    {0.8, 1.8, -2.0, 0.405101653818147170201},
    {0.8, 1.8, -30.0, 0.0330808046400260263207},
    {0.9, 0.9, -5.0, 0.0102127904529921337543},
    {0.9, 0.9, -25.0, 0.000174685519173777753849},
    {0.9, 1.0, -5.0, 0.0344313248040984239051},
    {0.9, 1.0, -25.0, 0.00451214712184018977389},
    {0.9, 1.0, -100.0, 0.00106897241828708928496},
    {0.9, 1.9, -5.0, 0.193113735039180315219},
    {0.9, 1.9, -60.0, 0.0166366294328119230835},
    {1.0, 1.0, -10.0, 0.0000453999297624848515356},
    {1.0, 1.0, -50.0, 1.92874984796391778302e-22},
    {1.0, 1.0, -100.0, 3.72007597602083596296e-44},
    {1.0, 2.0, -10.0, 0.0999954600070237515148},
    {1.0, 2.0, -100.0, 0.01},
    {1.2, 1.0, -10.0, -0.0263983471258692089415},
    {1.2, 1.0, -60.0, -0.00297304102566591997549},
    {1.2, 2.2, -60.0, 0.0167162173504277653329},
    {1.5, 1.0, -10.0, -0.109713054252740146694},
    {1.5, 1.0, -30.0, -0.0144702248341058745533},
    {1.5, 1.0, -100.0, -0.00278984677333723994128},
    {1.5, 1.5, -30.0, 0.00131255973811366785615},
    {1.5, 2.5, -40.0, 0.025248274136967335866},
    {1.8, 1.0, -10.0, -0.560574912545125628169},
    {1.8, 1.0, -100.0, 0.114943924813549172083},
    {1.8, 1.8, -80.0, -0.0200371046879861065021},
    {1.8, 2.8, -50.0, 0.0235287031171473390278},
    {1.9, 1.0, -50.0, 0.022022145114234578287},
    {2.0, 1.1, -1.0, 0.630769877632009471289},
    {2.0, 1.1, -16.0, -0.669864608105300347141},
    {2.0, 1.1, -100.0, -0.726794045947385199829},
    {2.0, 1.1, -400.0, 0.404332633588343445698},
    {2.0, 1.1, -1600.0, -0.374967984036610692544},
    {2.0, 1.2, -1.0, 0.706336625656207324478},
    {2.0, 1.2, -16.0, -0.657297790895360760128},
    {2.0, 1.2, -100.0, -0.611244899321672050436},
    {2.0, 1.2, -400.0, 0.367710816486232934527},
    {2.0, 1.2, -1600.0, -0.193312416316609516004},
    {2.0, 1.3, -1.0, 0.767074377482551476268},
    {2.0, 1.3, -16.0, -0.623106891400194923492},
    {2.0, 1.3, -100.0, -0.500726746816614601818},
    {2.0, 1.3, -400.0, 0.316167313430183370906},
    {2.0, 1.3, -1600.0, -0.0847855536382465293566},
};

}  // namespace

TEST_CASE("gamma matches reference values to 1e-12 relative") {
  const struct {
    double x, want;
  } table[] = {
      {0.1, 9.51350769866873183629},    {0.37, 2.40355002007865324846},
      {0.5, 1.7724538509055160273},     {0.8, 1.16422971372530337364},
      {1.5, 0.886226925452758013649},   {5.5, 52.3427777845535201811},
      {12.3, 83385367.8999698547129},   {29.9, 6.30417448837375151099e+30},
      {30.0, 8.84176199373970195454e+30},
  };
  for (const auto& [x, want] : table) {
    CAPTURE(x);
    CHECK(gamma_fn(x) == doctest::Approx(want).epsilon(1e-12));
  }
  CHECK(gamma_fn(1.0) == 1.0);
  CHECK(gamma_fn(2.0) == 1.0);
  CHECK(gamma_fn(6.0) == doctest::Approx(120.0).epsilon(1e-14));
}

TEST_CASE("gamma poles throw; reciprocal gamma is exactly zero there") {
  for (double pole : {0.0, -1.0, -2.0, -7.0}) {
    CAPTURE(pole);
    CHECK_THROWS_AS(gamma_fn(pole), std::domain_error);
    CHECK(rgamma(pole) == 0.0);
  }
  CHECK(rgamma(0.5) == doctest::Approx(1.0 / 1.7724538509055160273).epsilon(1e-13));
  // reflection-based negative arguments
  CHECK(rgamma(-0.5) == doctest::Approx(1.0 / -3.5449077018110320546).epsilon(1e-12));
}

TEST_CASE("sinpi and cospi reduce exactly on the lattice") {
  CHECK(sinpi(0.0) == 0.0);
  CHECK(sinpi(1.0) == 0.0);
  CHECK(sinpi(1234567.0) == 0.0);
  CHECK(sinpi(-42.0) == 0.0);
  CHECK(cospi(0.5) == 0.0);
  CHECK(cospi(7.5) == 0.0);
  CHECK(sinpi(0.5) == 1.0);
  CHECK(sinpi(0.25) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(cospi(1.0) == -1.0);
}

TEST_CASE("GL weights: pinned values, telescoped partial sums") {
  const auto w = gl_weights(0.5, 2);
  REQUIRE(w.size() == 3);
  CHECK(w[0] == 1.0);
  CHECK(w[1] == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(w[2] == doctest::Approx(-0.125).epsilon(1e-15));

  // For every alpha, sum_{k=0}^n w_k = (-1)^n binom(alpha-1, n), which
  // decreases from 1 toward 0; it stays strictly positive for alpha < 1 and
  // collapses to exactly 0 from n = 1 at the integer order.
  for (double alpha : {0.3, 0.5, 0.8, 1.0}) {
    CAPTURE(alpha);
    const auto ws = gl_weights(alpha, 100);
    double sum = 0.0;
    double binom = 1.0;  // (-1)^n binom(alpha-1, n) at n = 0
    double prev = 2.0;
    for (std::size_t n = 0; n <= 100; ++n) {
      sum += ws[n];
      if (n > 0) binom *= (static_cast<double>(n) - alpha) / static_cast<double>(n);
      CHECK(sum == doctest::Approx(binom).epsilon(1e-12));
      if (alpha < 1.0) {
        CHECK(sum > 0.0);
      } else {
        CHECK(sum == (n == 0 ? 1.0 : 0.0));
      }
      CHECK(sum <= 1.0);
      CHECK(sum <= prev + 1e-15);
      prev = sum;
    }
  }
}

TEST_CASE("product-integration weights match their closed form") {
  const double alpha = 0.8, dt = 0.002;
  const auto B = pi_weights(alpha, dt, 50);
  REQUIRE(B.size() == 51);
  const double g = gamma_fn(alpha + 1.0);
  for (std::size_t m = 0; m <= 50; ++m) {
    const double want =
        std::pow(dt, alpha) * (std::pow(m + 1.0, alpha) - std::pow(m, alpha)) / g;
    CHECK(B[m] == doctest::Approx(want).epsilon(1e-13));
    CHECK(B[m] > 0.0);
  }
}

TEST_CASE("Mittag-Leffler matches the frozen reference table") {
  for (const MlOracle& o : kMlTable) {
    CAPTURE(o.a);
    CAPTURE(o.b);
    CAPTURE(o.nu);
    const double got = mittag_leffler({o.a, o.b}, o.nu);
    CHECK(std::fabs(got - o.want) <= 1e-10 * std::max(1.0, std::fabs(o.want)));
  }
}

TEST_CASE("Mittag-Leffler identities: exp, cos, decay law") {
  for (double x : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
    CAPTURE(x);
    CHECK(std::fabs(mittag_leffler({1.0, 1.0}, x) - std::exp(x)) <= 1e-10);
  }
  for (double x : {0.5, 1.0, 2.0}) {
    CAPTURE(x);
    CHECK(std::fabs(mittag_leffler({2.0, 1.0}, -x * x) - std::cos(x)) <= 1e-10);
  }
  const struct {
    double alpha, t, want;
  } decay[] = {
      {0.5, 0.5, 0.523156583730246743364}, {0.5, 2.5, 0.308793556708283478854},
      {0.5, 5.0, 0.232326294376465074306}, {0.8, 0.5, 0.562319753129209365384},
      {0.8, 2.5, 0.180772270232524459431}, {0.8, 5.0, 0.0878274302932850844755},
      {0.9, 0.5, 0.582613467008630955587}, {0.9, 2.5, 0.133272263186854454158},
      {0.9, 5.0, 0.045223116690405382447},
  };
  for (const auto& [alpha, t, want] : decay) {
    CAPTURE(alpha);
    CAPTURE(t);
    CHECK(std::fabs(mittag_leffler({alpha, 1.0}, -std::pow(t, alpha)) - want) <= 1e-10);
  }
}

TEST_CASE("Mittag-Leffler representation switchover stays on one value") {
  // Points chosen near the series <-> asymptotic handover; the frozen values
  // pin that neither representation drifts.
  const MlOracle freeze[] = {
      {0.5, 0.5, -7.0, 0.00558920324368575251903},
      {0.5, 1.0, -6.0, 0.0927765678005383543895},
      {0.4, 1.0, -4.0, 0.152565094463000821975},
      {0.6, 1.4, -8.0, 0.103453355418582543883},
      {0.25, 1.0, -2.9, 0.224989512546453973107},
  };
  for (const MlOracle& o : freeze) {
    CAPTURE(o.a);
    CAPTURE(o.nu);
    CHECK(std::fabs(mittag_leffler({o.a, o.b}, o.nu) - o.want) <= 1e-8);
    // continuity across the handover: nearby arguments give nearby values
    const double eps = 1e-6;
    const double lo = mittag_leffler({o.a, o.b}, o.nu - eps);
    const double hi = mittag_leffler({o.a, o.b}, o.nu + eps);
    CHECK(std::fabs(hi - lo) <= 1e-4);
  }
}

TEST_CASE("Mittag-Leffler domain and overflow errors") {
  CHECK_THROWS_AS(mittag_leffler({0.0, 1.0}, -1.0), std::domain_error);
  CHECK_THROWS_AS(mittag_leffler({-0.5, 1.0}, -1.0), std::domain_error);
  CHECK_THROWS_AS(mittag_leffler({2.5, 1.0}, -1.0), std::domain_error);
  CHECK_THROWS_AS(mittag_leffler({0.5, 1.0}, std::nan("")), std::domain_error);
  CHECK(mittag_leffler({0.7, 1.3}, 0.0) == doctest::Approx(rgamma(1.3)).epsilon(1e-14));
  // Huge positive argument: series value exceeds double range.
  CHECK_THROWS_AS(mittag_leffler({0.5, 0.5}, 800.0), NumericError);
  try {
    mittag_leffler({0.5, 0.5}, 800.0);
  } catch (const NumericError& e) {
    CHECK(e.error_bound > 0.0);  // carries a diagnostic bound
  }
}

TEST_CASE("decay kernel and its exact antiderivative") {
  CHECK(ml_kernel(0.5, 1.0, 2.0) == doctest::Approx(0.0627382779550914650856).epsilon(1e-10));
  CHECK(ml_kernel_primitive(0.5, 1.0, 0.0) == 0.0);
  CHECK(ml_kernel_primitive(0.5, 1.0, 2.0) ==
        doctest::Approx(0.663795997553658787146).epsilon(1e-10));
  CHECK(ml_kernel_primitive(0.8, 0.7, 3.0) ==
        doctest::Approx(1.09725859598553142384).epsilon(1e-10));
  CHECK(ml_kernel_primitive(0.9, 2.0, 1.5) ==
        doctest::Approx(0.454976006972964242267).epsilon(1e-10));

  // kernel positivity on a grid (complete monotonicity of the decay law)
  for (double alpha : {0.3, 0.5, 0.8, 1.0}) {
    for (double lambda : {0.0, 0.5, 2.0}) {
      for (double t = 0.05; t <= 20.0; t += 0.6175) {
        CAPTURE(alpha);
        CAPTURE(lambda);
        CAPTURE(t);
        CHECK(ml_kernel(alpha, lambda, t) > 0.0);
      }
    }
  }
}

TEST_CASE("Caputo derivative of sin(2t): closed form against references") {
  const struct {
    double alpha, t, want;
  } table[] = {
      {0.8, 0.1, 1.35362003301419018848},    {0.8, 1.0, -0.25382622400662303338},
      {0.8, 5.0, -1.68670543602196984378},   {0.8, 20.0, -0.703875330292988076184},
      {0.9, 1.0, -0.529868356216903920247},  {0.9, 10.0, 1.01804925448405079377},
      {0.9, 20.0, -1.01187573857466661172},  {0.7, 1.0, -0.00668303052574070994461},
      {0.7, 10.0, 1.26167345142439802135},   {0.7, 20.0, -0.416543972752952033309},
  };
  for (const auto& [alpha, t, want] : table) {
    CAPTURE(alpha);
    CAPTURE(t);
    CHECK(caputo_deriv_sin(alpha, 2.0, t) == doctest::Approx(want).epsilon(1e-9));
  }
  CHECK(caputo_deriv_sin(0.8, 2.0, 0.0) == 0.0);
  // alpha = 1 degenerates to the classical derivative
  CHECK(caputo_deriv_sin(1.0, 2.0, 3.0) == doctest::Approx(2.0 * std::cos(6.0)).epsilon(1e-9));
}

TEST_CASE("fractional Euler step: constants, alpha = 1, convergence order") {
  SUBCASE("derivative of a constant is zero") {
    MemoryBuffer buf(3.25, 0.01);
    for (int i = 0; i < 50; ++i) CHECK(frac_step(0.6, buf, 0.0, 0.01) == 3.25);
  }
  SUBCASE("alpha = 1 reproduces forward Euler bitwise for zero start") {
    MemoryBuffer buf(0.0, 0.1);
    double x_euler = 0.0;
    for (int i = 0; i < 40; ++i) {
      const double rhs = 1.0 - x_euler;  // dx/dt = 1 - x
      const double got = frac_step(1.0, buf, rhs, 0.1);
      x_euler = x_euler + 0.1 * rhs;
      CHECK(got == x_euler);
    }
  }
  SUBCASE("first-order self-convergence on the decay law (alpha = 0.8)") {
    const double alpha = 0.8;
    auto max_err = [&](double dt) {
      MemoryBuffer buf(1.0, dt);
      const auto n = static_cast<std::size_t>(std::llround(5.0 / dt));
      double worst = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double x = frac_step(alpha, buf, -buf.samples.back(), dt);
        const double t = static_cast<double>(i + 1) * dt;
        worst = std::max(worst, std::fabs(x - mittag_leffler({alpha, 1.0}, -std::pow(t, alpha))));
      }
      return worst;
    };
    const double ratio = max_err(2e-3) / max_err(1e-3);
    CAPTURE(ratio);
    CHECK(ratio >= 1.6);
    CHECK(ratio <= 2.4);
  }
}

TEST_CASE("singular convolution: zero, constant, linearity, error estimate") {
  const double dt = 1e-3;
  const std::size_t n = 2001;  // t = 2
  std::vector<double> zero(n, 0.0), one(n, 1.0), ramp(n), mix(n);
  for (std::size_t i = 0; i < n; ++i) ramp[i] = static_cast<double>(i) * dt;
  for (std::size_t i = 0; i < n; ++i) mix[i] = 2.0 * one[i] - 3.0 * ramp[i];

  CHECK(singular_convolve(0.5, 1.0, zero, dt).value == 0.0);

  // lambda = 0, v = 1: integral of (t-s)^{alpha-1}/Gamma(alpha) = t^alpha/Gamma(alpha+1)
  for (double alpha : {0.5, 0.8, 1.0}) {
    CAPTURE(alpha);
    const auto r = singular_convolve(alpha, 0.0, one, dt);
    const double want = std::pow(2.0, alpha) / gamma_fn(alpha + 1.0);
    CHECK(r.value == doctest::Approx(want).epsilon(1e-12));
    CHECK(std::fabs(r.value - want) <= r.err_est + 1e-12);
  }

  // lambda > 0, v = 1: exact antiderivative of the kernel
  const auto c = singular_convolve(0.5, 1.0, one, dt);
  CHECK(c.value == doctest::Approx(0.663795997553658787146).epsilon(1e-10));

  // linearity is exact up to roundoff
  const auto r1 = singular_convolve(0.7, 0.9, one, dt);
  const auto r2 = singular_convolve(0.7, 0.9, ramp, dt);
  const auto rm = singular_convolve(0.7, 0.9, mix, dt);
  CHECK(rm.value == doctest::Approx(2.0 * r1.value - 3.0 * r2.value).epsilon(1e-12));

  // the error estimate is honest for a smooth integrand: exact value of
  // int_0^2 s K(t-s) ds via integration by parts F-primitive is hard here;
  // instead halve dt and require the coarse estimate to cover the change.
  std::vector<double> ramp_fine(4001);
  for (std::size_t i = 0; i < ramp_fine.size(); ++i) ramp_fine[i] = static_cast<double>(i) * 5e-4;
  const auto fine = singular_convolve(0.7, 0.9, ramp_fine, 5e-4);
  CHECK(std::fabs(fine.value - r2.value) <= r2.err_est);
}

TEST_CASE("decay-envelope constant: fitted on the grid, valid between nodes") {
  for (const auto& [a, b] : {std::pair{0.8, 0.8}, {0.5, 1.0}, {0.9, 0.9}, {1.5, 1.0}}) {
    CAPTURE(a);
    CAPTURE(b);
    const double sigma = lemma3_sigma(a, b);
    CHECK(sigma > 0.0);
    // half-grid validation: between fit nodes the envelope still holds
    for (int i = 0; i < 100; ++i) {
      const double nu = -(static_cast<double>(i) + 0.5) * 0.5;
      const double e = mittag_leffler({a, b}, nu);
      CHECK(std::fabs(e) * (1.0 + std::fabs(nu)) <= sigma);
    }
  }
  CHECK_THROWS_AS(lemma3_sigma(2.0, 1.0), std::domain_error);
}

TEST_CASE("differentiation-order type validates its domain") {
  CHECK_THROWS_AS(FracOrder{0.0}, std::domain_error);
  CHECK_THROWS_AS(FracOrder{-0.3}, std::domain_error);
  CHECK_THROWS_AS(FracOrder{1.2}, std::domain_error);
  CHECK(FracOrder{1.0}.alpha == 1.0);
  CHECK(FracOrder{0.8}.alpha == 0.8);
}
