#include <doctest.h>

#include <cmath>

#include "vrb/errors.hpp"
#include "vrb/estimator.hpp"
#include "vrb/finite_diff.hpp"

using namespace vrb;

namespace {

double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

EncoderParams zero_encoder(int state_dim, int act_dim, int d_z, int hidden) {
    RngStream rng(0, 0);
    EncoderParams enc = EncoderParams::init(state_dim, act_dim, d_z, hidden, rng);
    std::fill(enc.g_params.begin(), enc.g_params.end(), 0.0);
    std::fill(enc.h_params.begin(), enc.h_params.end(), 0.0);
    return enc;
}

TransitionSide random_side(RngStream& rng, std::size_t n, int state_dim, int act_dim) {
    TransitionSide side;
    for (std::size_t i = 0; i < n; ++i) {
        StateVector x(state_dim), xn(state_dim);
        for (double& v : x) v = rng.uniform(-1.0, 1.0);
        for (double& v : xn) v = rng.uniform(-1.0, 1.0);
        std::vector<double> a(act_dim, 0.0);
        a[rng.index(act_dim)] = 1.0;
        side.x.push_back(std::move(x));
        side.x_next.push_back(std::move(xn));
        side.action.push_back(std::move(a));
        side.log_pi.push_back(rng.uniform(-3.0, 0.0));
    }
    return side;
}

EstimatorBatch random_batch(RngStream& rng, std::size_t n, int state_dim, int act_dim) {
    EstimatorBatch batch;
    batch.expert = random_side(rng, n, state_dim, act_dim);
    batch.policy = random_side(rng, n, state_dim, act_dim);
    return batch;
}

} // namespace

TEST_SUITE("encode") {
    TEST_CASE("zero weights and zero noise give zero latents") {
        const EncoderParams enc = zero_encoder(4, 2, 3, 5);
        const StateVector x(4, 0.5), xn(4, -0.5);
        const std::vector<double> a(2, 1.0);
        const std::vector<double> noise(9, 0.0);
        const LatentTriple lat = encode_with_noise(enc, x, xn, a, noise);
        for (double z : lat.z_g) CHECK(z == 0.0);
        for (double z : lat.z_h) CHECK(z == 0.0);
        for (double z : lat.z_hp) CHECK(z == 0.0);
        for (double m : lat.mu_g) CHECK(m == 0.0);
        for (double lv : lat.logvar_g) CHECK(lv == 0.0);
    }

    TEST_CASE("same rng state reproduces the triple") {
        RngStream rng(3, 0);
        EncoderParams enc = EncoderParams::init(4, 2, 3, 5, rng);
        const StateVector x(4, 0.2), xn(4, 0.7);
        const std::vector<double> a = {1.0, 0.0};
        RngStream r1(9, 9), r2(9, 9);
        const LatentTriple l1 = encode(enc, x, xn, a, r1);
        const LatentTriple l2 = encode(enc, x, xn, a, r2);
        CHECK(l1.z_g == l2.z_g);
        CHECK(l1.z_h == l2.z_h);
        CHECK(l1.z_hp == l2.z_hp);
        CHECK(l1.noise_g == l2.noise_g);
    }

    TEST_CASE("reparameterization Jacobian matches finite differences") {
        // bias-only encoder: raw output = bias, so d z / d bias is exactly
        // the reparameterization Jacobian
        EncoderParams enc = zero_encoder(2, 1, 2, 3);
        // set g head biases: mu = (0.3, -0.4), logvar = (0.2, -0.6)
        const std::size_t bias_off = enc.g_spec.bias_offset(enc.g_spec.layer_count() - 1);
        enc.g_params[bias_off + 0] = 0.3;
        enc.g_params[bias_off + 1] = -0.4;
        enc.g_params[bias_off + 2] = 0.2;
        enc.g_params[bias_off + 3] = -0.6;

        const StateVector x(2, 0.0), xn(2, 0.0);
        const std::vector<double> a(1, 0.0);
        std::vector<double> noise = {0.7, -1.1, 0.0, 0.0, 0.0, 0.0};
        const LatentTriple base = encode_with_noise(enc, x, xn, a, noise);

        for (int i = 0; i < 2; ++i) {
            for (int half = 0; half < 2; ++half) {
                const std::size_t idx = bias_off + half * 2 + i;
                const double h = 1e-6;
                EncoderParams up = enc, down = enc;
                up.g_params[idx] += h;
                down.g_params[idx] -= h;
                const LatentTriple lu = encode_with_noise(up, x, xn, a, noise);
                const LatentTriple ld = encode_with_noise(down, x, xn, a, noise);
                const double fd = (lu.z_g[i] - ld.z_g[i]) / (2.0 * h);
                const double analytic =
                    half == 0 ? 1.0 : 0.5 * (base.z_g[i] - base.mu_g[i]);
                CHECK(rel_err(fd, analytic) < 1e-5);
            }
        }
    }

    TEST_CASE("log-variance is clamped into a safe range") {
        EncoderParams enc = zero_encoder(1, 1, 1, 2);
        const std::size_t bias_off = enc.g_spec.bias_offset(enc.g_spec.layer_count() - 1);
        enc.g_params[bias_off + 1] = 99.0; // raw logvar
        const LatentTriple lat = encode_mean(enc, StateVector{0.0}, StateVector{0.0},
                                             std::vector<double>{0.0});
        CHECK(lat.logvar_g[0] == 5.0);
    }

    TEST_CASE("width mismatches are rejected") {
        const EncoderParams enc = zero_encoder(4, 2, 3, 5);
        RngStream rng(1, 1);
        CHECK_THROWS_AS((void)encode(enc, StateVector(3, 0.0), StateVector(4, 0.0),
                                     std::vector<double>(2, 0.0), rng),
                        ShapeError);
    }
}

TEST_SUITE("kl_std_normal") {
    TEST_CASE("standard normal to itself is zero") {
        CHECK(kl_std_normal(std::vector<double>{0.0, 0.0}, std::vector<double>{0.0, 0.0}) == 0.0);
    }

    TEST_CASE("unit mean shift costs one half nat") {
        CHECK(kl_std_normal(std::vector<double>{1.0}, std::vector<double>{0.0}) ==
              doctest::Approx(0.5).epsilon(1e-15));
    }

    TEST_CASE("closed form matches Monte-Carlo integration") {
        RngStream rng(42, 3);
        const std::vector<double> mu = {rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
        const std::vector<double> logvar = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        const double exact = kl_std_normal(mu, logvar);

        const int n = 1000000;
        double sum = 0.0, sq = 0.0;
        for (int i = 0; i < n; ++i) {
            double ratio = 0.0;
            for (int d = 0; d < 2; ++d) {
                const double sigma = std::exp(0.5 * logvar[d]);
                const double eps = rng.normal();
                const double z = mu[d] + sigma * eps;
                ratio += -0.5 * logvar[d] - 0.5 * eps * eps + 0.5 * z * z;
            }
            sum += ratio;
            sq += ratio * ratio;
        }
        const double mc = sum / n;
        const double se = std::sqrt((sq / n - mc * mc) / n);
        CHECK(std::abs(mc - exact) < 3.0 * se);
    }

    TEST_CASE("non-finite parameters are rejected") {
        CHECK_THROWS_AS((void)kl_std_normal(std::vector<double>{std::nan("")},
                                            std::vector<double>{0.0}),
                        NumericError);
    }
}

TEST_SUITE("f_score") {
    TEST_CASE("zero heads give zero score") {
        RngStream rng(1, 0);
        RewardHeads heads = RewardHeads::init(2, 3, rng);
        std::fill(heads.g_params.begin(), heads.g_params.end(), 0.0);
        std::fill(heads.h_params.begin(), heads.h_params.end(), 0.0);
        LatentTriple lat;
        lat.z_g = {0.4, -0.2};
        lat.z_h = {1.0, 1.0};
        lat.z_hp = {-1.0, 0.5};
        CHECK(f_score(heads, lat, 0.99) == 0.0);
    }

    TEST_CASE("hand-evaluated three-term combination") {
        // one-dimensional linear heads: D_g(z) = 1, D_h(z) = z
        RewardHeads heads;
        heads.g_spec = MlpSpec{{1, 1}};
        heads.h_spec = MlpSpec{{1, 1}};
        heads.g_params = {0.0, 1.0}; // w = 0, b = 1
        heads.h_params = {1.0, 0.0}; // w = 1, b = 0
        LatentTriple lat;
        lat.z_g = {5.0};
        lat.z_hp = {2.0};
        lat.z_h = {3.0};
        const double f = f_score(heads, lat, 0.99, ShapingSign::airl_minus);
        CHECK(f == doctest::Approx(1.0 + 0.99 * 2.0 - 3.0).epsilon(1e-15));
        const double f_plus = f_score(heads, lat, 0.99, ShapingSign::paper_plus);
        CHECK(f_plus == doctest::Approx(1.0 + 0.99 * 2.0 + 3.0).epsilon(1e-15));
    }

    TEST_CASE("constant shaping head cancels exactly at gamma 1") {
        RngStream rng(7, 0);
        RewardHeads heads = RewardHeads::init(3, 4, rng);
        // constant D_h == c: zero weights, bias c
        std::fill(heads.h_params.begin(), heads.h_params.end(), 0.0);
        heads.h_params[heads.h_spec.bias_offset(heads.h_spec.layer_count() - 1)] = 1.7;

        double sum_f = 0.0, sum_g = 0.0;
        for (int t = 0; t < 10; ++t) {
            LatentTriple lat;
            lat.z_g = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
            lat.z_h = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
            lat.z_hp = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
            sum_f += f_score(heads, lat, 1.0);
            sum_g += mlp_forward(heads.g_spec, heads.g_params, lat.z_g)[0];
        }
        CHECK(sum_f == sum_g); // the shaping terms cancel term by term
    }
}

TEST_SUITE("discriminator") {
    TEST_CASE("balance point is one half") {
        CHECK(discriminator_prob(2.0, 2.0) == 0.5);
        CHECK(discriminator_prob(-3.0, -3.0) == 0.5);
    }

    TEST_CASE("saturation stays strictly inside (0, 1)") {
        const double hi = discriminator_prob(100.0, 0.0);
        CHECK(hi < 1.0);
        CHECK(1.0 - hi < 1e-12);
        const double lo = discriminator_prob(-800.0, 0.0);
        CHECK(lo > 0.0);
        CHECK(lo < 1e-300);
    }

    TEST_CASE("log-odds identity holds to 1e-9") {
        RngStream rng(12, 0);
        for (int i = 0; i < 1000; ++i) {
            const double f = rng.uniform(-6.0, 6.0);
            const double log_pi = rng.uniform(-6.0, 0.0);
            const double d = discriminator_prob(f, log_pi);
            const double log_odds = std::log(d) - std::log(1.0 - d);
            CHECK(std::abs(log_odds - shaped_reward(f, log_pi)) < 1e-9);
        }
    }

    TEST_CASE("shaped reward is the plain difference") {
        CHECK(shaped_reward(0.0, 0.0) == 0.0);
        CHECK(shaped_reward(1.0, -1.0) == 2.0);
    }
}

TEST_SUITE("bottleneck_penalty") {
    TEST_CASE("zero-KL encoder gives minus the bound") {
        RngStream rng(5, 0);
        EstimatorBatch batch = random_batch(rng, 4, 6, 3);
        const EncoderParams enc = zero_encoder(6, 3, 2, 4);
        VrbConfig cfg;
        CHECK(bottleneck_penalty(batch, enc, cfg) == doctest::Approx(-0.5).epsilon(1e-15));
    }

    TEST_CASE("hand-computed single-sample penalty") {
        // g head bias forces mu = 1 on its single latent; h head stays zero
        EncoderParams enc = zero_encoder(2, 1, 1, 2);
        enc.g_params[enc.g_spec.bias_offset(enc.g_spec.layer_count() - 1)] = 1.0;
        EstimatorBatch batch;
        RngStream rng(6, 0);
        batch.expert = random_side(rng, 1, 2, 1);
        batch.policy = random_side(rng, 1, 2, 1);
        VrbConfig cfg;
        // summed KL = 0.5 (g) + 0 + 0; penalty = 0.5 - i_c
        CHECK(bottleneck_penalty(batch, enc, cfg) ==
              doctest::Approx(0.5 - cfg.i_c).epsilon(1e-12));
    }

    TEST_CASE("duplicating the batch leaves the penalty unchanged") {
        RngStream rng(7, 0);
        EstimatorBatch batch = random_batch(rng, 5, 6, 3);
        RngStream enc_rng(8, 0);
        const EncoderParams enc = EncoderParams::init(6, 3, 2, 4, enc_rng);
        VrbConfig cfg;
        const double once = bottleneck_penalty(batch, enc, cfg);
        EstimatorBatch doubled = batch;
        for (std::size_t i = 0; i < batch.policy.size(); ++i) {
            doubled.policy.x.push_back(batch.policy.x[i]);
            doubled.policy.x_next.push_back(batch.policy.x_next[i]);
            doubled.policy.action.push_back(batch.policy.action[i]);
            doubled.policy.log_pi.push_back(batch.policy.log_pi[i]);
        }
        CHECK(bottleneck_penalty(doubled, enc, cfg) == doctest::Approx(once).epsilon(1e-12));
    }
}

TEST_SUITE("vrb_loss") {
    TEST_CASE("identical sides with shared noise and zero phi cancel") {
        RngStream rng(9, 0);
        EstimatorBatch batch;
        batch.expert = random_side(rng, 4, 6, 3);
        batch.policy = batch.expert;
        RngStream model_rng(10, 0);
        EncoderParams enc = EncoderParams::init(6, 3, 2, 4, model_rng);
        RewardHeads heads = RewardHeads::init(2, 4, model_rng);
        VrbConfig cfg;
        cfg.phi = 0.0;
        NoiseMatrix noise = draw_noise(batch, 2, model_rng);
        // mirror the expert rows onto the policy rows
        for (std::size_t i = 0; i < 4; ++i) {
            for (int k = 0; k < noise.row_width; ++k) {
                noise.values[(4 + i) * noise.row_width + k] =
                    noise.values[i * noise.row_width + k];
            }
        }
        const EstimatorDiagnostics diag = vrb_loss_with_noise(batch, enc, heads, cfg, noise);
        CHECK(diag.loss == 0.0);
        CHECK(diag.mean_expert_f == diag.mean_policy_f);
    }

    TEST_CASE("zero-KL encoder reproduces the closed-form penalty shift") {
        RngStream rng(11, 0);
        EstimatorBatch batch = random_batch(rng, 4, 6, 3);
        EncoderParams enc = zero_encoder(6, 3, 2, 4);
        RngStream head_rng(12, 0);
        RewardHeads heads = RewardHeads::init(2, 4, head_rng);
        VrbConfig cfg; // phi = 0.001, i_c = 0.5
        cfg.encoder_noise = false;
        const NoiseMatrix noise = zero_noise(batch, 2);
        const EstimatorDiagnostics diag = vrb_loss_with_noise(batch, enc, heads, cfg, noise);
        const double gap = diag.mean_expert_f - diag.mean_policy_f;
        CHECK(diag.mean_policy_kl == 0.0);
        CHECK(diag.loss == doctest::Approx(-(gap + 0.0005)).epsilon(1e-12));
    }

    TEST_CASE("analytic gradient matches finite differences") {
        RngStream rng(13, 0);
        EstimatorBatch batch = random_batch(rng, 4, 5, 3);
        EstimatorModel model;
        RngStream model_rng(14, 0);
        model.enc = EncoderParams::init(5, 3, 2, 4, model_rng);
        model.heads = RewardHeads::init(2, 4, model_rng);
        VrbConfig cfg;
        cfg.phi = 0.003;
        const NoiseMatrix noise = draw_noise(batch, 2, model_rng);

        EstimatorGrads grads;
        vrb_loss_grad(batch, model.enc, model.heads, cfg, noise, grads);
        const ParamVector analytic = pack_estimator_grads(grads);

        EstimatorModel scratch = model;
        const ParamVector flat = pack_estimator_params(scratch);
        const ParamVector fd = finite_diff_grad(
            [&](const ParamVector& p) {
                unpack_estimator_params(p, scratch);
                return vrb_loss_with_noise(batch, scratch.enc, scratch.heads, cfg, noise).loss;
            },
            flat, 1e-5);
        double worst = 0.0;
        for (std::size_t i = 0; i < fd.size(); ++i) {
            worst = std::max(worst, rel_err(analytic[i], fd[i]));
        }
        CHECK(worst < 1e-4);
    }

    TEST_CASE("empty sides are rejected") {
        EstimatorBatch batch;
        RngStream rng(15, 0);
        batch.expert = random_side(rng, 2, 5, 3);
        const EncoderParams enc = zero_encoder(5, 3, 2, 4);
        RngStream head_rng(16, 0);
        const RewardHeads heads = RewardHeads::init(2, 4, head_rng);
        VrbConfig cfg;
        RngStream loss_rng(17, 0);
        CHECK_THROWS_AS((void)vrb_loss(batch, enc, heads, cfg, loss_rng), StateError);
    }
}

TEST_SUITE("airl_loss") {
    TEST_CASE("identical sides cancel exactly") {
        RngStream rng(18, 0);
        EstimatorBatch batch;
        batch.expert = random_side(rng, 4, 6, 3);
        batch.policy = batch.expert;
        RngStream model_rng(19, 0);
        const EncoderParams enc = EncoderParams::init(6, 3, 2, 4, model_rng);
        const RewardHeads heads = RewardHeads::init(2, 4, model_rng);
        VrbConfig cfg;
        CHECK(airl_loss(batch, enc, heads, cfg) == 0.0);
    }

    TEST_CASE("equals the bottleneck objective at phi 0 with frozen encoder") {
        RngStream rng(20, 0);
        EstimatorBatch batch = random_batch(rng, 5, 6, 3);
        RngStream model_rng(21, 0);
        const EncoderParams enc = EncoderParams::init(6, 3, 2, 4, model_rng);
        const RewardHeads heads = RewardHeads::init(2, 4, model_rng);
        VrbConfig cfg; // non-zero phi and noise on purpose
        VrbConfig flat = cfg;
        flat.phi = 0.0;
        flat.encoder_noise = false;
        const EstimatorDiagnostics direct =
            vrb_loss_with_noise(batch, enc, heads, flat, zero_noise(batch, 2));
        CHECK(airl_loss(batch, enc, heads, cfg) == direct.loss);
    }

    TEST_CASE("uniform score shifts cancel between the two sides") {
        RngStream rng(22, 0);
        EstimatorBatch batch = random_batch(rng, 5, 6, 3);
        RngStream model_rng(23, 0);
        const EncoderParams enc = EncoderParams::init(6, 3, 2, 4, model_rng);
        RewardHeads heads = RewardHeads::init(2, 4, model_rng);
        VrbConfig cfg;
        const double before = airl_loss(batch, enc, heads, cfg);
        // shifting D_g by a constant moves every f on both sides equally
        heads.g_params[heads.g_spec.bias_offset(heads.g_spec.layer_count() - 1)] += 3.25;
        const double after = airl_loss(batch, enc, heads, cfg);
        CHECK(before == doctest::Approx(after).epsilon(1e-12));
    }
}

TEST_SUITE("update_estimator") {
    TEST_CASE("zero learning rate leaves parameters unchanged") {
        RngStream rng(24, 0);
        EstimatorBatch batch = random_batch(rng, 4, 6, 3);
        EstimatorModel model;
        RngStream model_rng(25, 0);
        model.enc = EncoderParams::init(6, 3, 2, 4, model_rng);
        model.heads = RewardHeads::init(2, 4, model_rng);
        EstimatorOptimizer opt = EstimatorOptimizer::make(model, 0.0);
        const EstimatorModel before = model;
        VrbConfig cfg;
        RngStream noise_rng(26, 0);
        update_estimator(opt, model, batch, cfg, noise_rng, false);
        CHECK(model.enc.g_params == before.enc.g_params);
        CHECK(model.enc.h_params == before.enc.h_params);
        CHECK(model.heads.g_params == before.heads.g_params);
        CHECK(model.heads.h_params == before.heads.h_params);
        CHECK(opt.enc_g.step_count == 1);
    }

    TEST_CASE("one default-rate step decreases the loss under frozen noise") {
        RngStream rng(27, 0);
        EstimatorBatch batch = random_batch(rng, 8, 6, 3);
        EstimatorModel model;
        RngStream model_rng(28, 0);
        model.enc = EncoderParams::init(6, 3, 2, 4, model_rng);
        model.heads = RewardHeads::init(2, 4, model_rng);
        EstimatorOptimizer opt = EstimatorOptimizer::make(model, 1e-4);
        VrbConfig cfg;
        const NoiseMatrix noise = draw_noise(batch, 2, model_rng);
        const double before = vrb_loss_with_noise(batch, model.enc, model.heads, cfg, noise).loss;

        EstimatorGrads grads;
        const EstimatorDiagnostics diag =
            vrb_loss_grad(batch, model.enc, model.heads, cfg, noise, grads);
        CHECK(diag.loss == before);
        adam_step(opt.enc_g, model.enc.g_params, grads.enc_g);
        adam_step(opt.enc_h, model.enc.h_params, grads.enc_h);
        adam_step(opt.head_g, model.heads.g_params, grads.head_g);
        adam_step(opt.head_h, model.heads.h_params, grads.head_h);
        const double after = vrb_loss_with_noise(batch, model.enc, model.heads, cfg, noise).loss;
        CHECK(after < before);
    }

    TEST_CASE("overfitting a separable batch separates the discriminator") {
        const int state_dim = 6;
        EstimatorBatch batch;
        for (int i = 0; i < 8; ++i) {
            StateVector xe(state_dim, 1.0), xne(state_dim, 1.0);
            StateVector xp(state_dim, -1.0), xnp(state_dim, -1.0);
            std::vector<double> a(3, 0.0);
            a[0] = 1.0;
            batch.expert.x.push_back(xe);
            batch.expert.x_next.push_back(xne);
            batch.expert.action.push_back(a);
            batch.expert.log_pi.push_back(std::log(0.5));
            batch.policy.x.push_back(xp);
            batch.policy.x_next.push_back(xnp);
            batch.policy.action.push_back(a);
            batch.policy.log_pi.push_back(std::log(0.5));
        }
        EstimatorModel model;
        RngStream model_rng(29, 0);
        model.enc = EncoderParams::init(state_dim, 3, 2, 8, model_rng);
        model.heads = RewardHeads::init(2, 8, model_rng);
        EstimatorOptimizer opt = EstimatorOptimizer::make(model, 0.01);
        VrbConfig cfg;
        RngStream noise_rng(30, 0);
        for (int step = 0; step < 200; ++step) {
            update_estimator(opt, model, batch, cfg, noise_rng, false);
        }
        const std::vector<double> f_e = mean_f_scores(batch.expert, model.enc, model.heads,
                                                      cfg.gamma, cfg.shaping_sign);
        const std::vector<double> f_p = mean_f_scores(batch.policy, model.enc, model.heads,
                                                      cfg.gamma, cfg.shaping_sign);
        for (std::size_t i = 0; i < f_e.size(); ++i) {
            CHECK(discriminator_prob(f_e[i], batch.expert.log_pi[i]) > 0.9);
            CHECK(discriminator_prob(f_p[i], batch.policy.log_pi[i]) < 0.1);
        }
    }

    TEST_CASE("adaptive phi follows the dual-ascent rule") {
        RngStream rng(31, 0);
        EstimatorBatch batch = random_batch(rng, 4, 6, 3);
        EstimatorModel model;
        RngStream model_rng(32, 0);
        model.enc = EncoderParams::init(6, 3, 2, 4, model_rng);
        model.heads = RewardHeads::init(2, 4, model_rng);
        EstimatorOptimizer opt = EstimatorOptimizer::make(model, 1e-4);
        VrbConfig cfg;
        cfg.adaptive_phi = true;
        cfg.phi_step = 0.5;
        cfg.phi = 0.0;
        RngStream noise_rng(33, 0);
        const EstimatorDiagnostics diag =
            update_estimator(opt, model, batch, cfg, noise_rng, false);
        CHECK(cfg.phi == diag.next_phi);
        CHECK(cfg.phi ==
              doctest::Approx(std::max(0.0, 0.5 * (diag.mean_policy_kl - cfg.i_c))));
    }
}

TEST_SUITE("score_paths") {
    TEST_CASE("batch scores equal the public op composition") {
        RngStream rng(60, 0);
        const TransitionSide side = random_side(rng, 6, 5, 3);
        RngStream model_rng(61, 0);
        const EncoderParams enc = EncoderParams::init(5, 3, 2, 4, model_rng);
        const RewardHeads heads = RewardHeads::init(2, 4, model_rng);
        const std::vector<double> batched =
            mean_f_scores(side, enc, heads, 0.99, ShapingSign::airl_minus);
        for (std::size_t i = 0; i < side.size(); ++i) {
            const LatentTriple lat =
                encode_mean(enc, side.x[i], side.x_next[i], side.action[i]);
            CHECK(batched[i] == f_score(heads, lat, 0.99, ShapingSign::airl_minus));
        }
    }
}

TEST_SUITE("estimator_parallel") {
    TEST_CASE("serial and OpenMP paths are bit-identical") {
        RngStream rng(34, 0);
        EstimatorBatch batch = random_batch(rng, 40, 8, 4);
        EstimatorModel model;
        RngStream model_rng(35, 0);
        model.enc = EncoderParams::init(8, 4, 3, 6, model_rng);
        model.heads = RewardHeads::init(3, 6, model_rng);
        VrbConfig cfg;
        const NoiseMatrix noise = draw_noise(batch, 3, model_rng);

        EstimatorGrads gs, gp;
        const EstimatorDiagnostics ds =
            vrb_loss_grad(batch, model.enc, model.heads, cfg, noise, gs, ExecMode::serial);
        const EstimatorDiagnostics dp =
            vrb_loss_grad(batch, model.enc, model.heads, cfg, noise, gp, ExecMode::parallel);
        CHECK(ds.loss == dp.loss);
        CHECK(ds.mean_expert_f == dp.mean_expert_f);
        CHECK(ds.mean_policy_kl == dp.mean_policy_kl);
        CHECK(gs.enc_g == gp.enc_g);
        CHECK(gs.enc_h == gp.enc_h);
        CHECK(gs.head_g == gp.head_g);
        CHECK(gs.head_h == gp.head_h);

        const std::vector<double> fs = mean_f_scores(batch.policy, model.enc, model.heads,
                                                     cfg.gamma, cfg.shaping_sign,
                                                     ExecMode::serial);
        const std::vector<double> fp = mean_f_scores(batch.policy, model.enc, model.heads,
                                                     cfg.gamma, cfg.shaping_sign,
                                                     ExecMode::parallel);
        CHECK(fs == fp);
        CHECK(bottleneck_penalty(batch, model.enc, cfg, ExecMode::serial) ==
              bottleneck_penalty(batch, model.enc, cfg, ExecMode::parallel));
    }
}

TEST_SUITE("information_bound") {
    // four discrete states, a 1-D Gaussian code per state: the quadrature
    // mutual information never exceeds the mean KL to the standard normal
    TEST_CASE("quadrature mutual information respects the KL upper bound") {
        RngStream rng(36, 0);
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<double> mu(4), logvar(4);
            for (int i = 0; i < 4; ++i) {
                mu[i] = rng.uniform(-2.0, 2.0);
                logvar[i] = rng.uniform(-2.0, 1.0);
            }
            double bound = 0.0;
            for (int i = 0; i < 4; ++i) {
                bound += 0.25 * kl_std_normal(std::span(&mu[i], 1), std::span(&logvar[i], 1));
            }

            // composite Simpson over a generous interval
            double lo = 1e300, hi = -1e300;
            for (int i = 0; i < 4; ++i) {
                const double s = std::exp(0.5 * logvar[i]);
                lo = std::min(lo, mu[i] - 12.0 * s);
                hi = std::max(hi, mu[i] + 12.0 * s);
            }
            const int n = 40001;
            const double dz = (hi - lo) / (n - 1);
            auto integrand = [&](double z) {
                double p_z = 0.0;
                double contrib = 0.0;
                std::vector<double> q(4);
                for (int i = 0; i < 4; ++i) {
                    const double s2 = std::exp(logvar[i]);
                    q[i] = std::exp(-0.5 * (z - mu[i]) * (z - mu[i]) / s2) /
                           std::sqrt(2.0 * 3.14159265358979323846 * s2);
                    p_z += 0.25 * q[i];
                }
                for (int i = 0; i < 4; ++i) {
                    if (q[i] > 1e-300 && p_z > 1e-300) {
                        contrib += 0.25 * q[i] * (std::log(q[i]) - std::log(p_z));
                    }
                }
                return contrib;
            };
            double integral = integrand(lo) + integrand(hi);
            for (int k = 1; k + 1 < n; ++k) {
                integral += integrand(lo + k * dz) * (k % 2 == 1 ? 4.0 : 2.0);
            }
            integral *= dz / 3.0;
            CHECK(integral <= bound + 1e-6);
        }
    }
}

TEST_SUITE("bottleneck_pressure") {
    TEST_CASE("more pressure drives the policy KL lower") {
        const int state_dim = 6;
        std::vector<double> kl_by_phi;
        for (double phi : {0.0, 1.0}) {
            std::vector<double> finals;
            for (int seed = 0; seed < 3; ++seed) {
                RngStream rng(100 + seed, 0);
                EstimatorBatch batch = random_batch(rng, 8, state_dim, 3);
                EstimatorModel model;
                model.enc = EncoderParams::init(state_dim, 3, 2, 6, rng);
                model.heads = RewardHeads::init(2, 6, rng);
                EstimatorOptimizer opt = EstimatorOptimizer::make(model, 0.01);
                VrbConfig cfg;
                cfg.phi = phi;
                RngStream noise_rng(200 + seed, 0);
                EstimatorDiagnostics diag;
                for (int step = 0; step < 150; ++step) {
                    diag = update_estimator(opt, model, batch, cfg, noise_rng, false);
                }
                finals.push_back(diag.mean_policy_kl);
            }
            std::sort(finals.begin(), finals.end());
            kl_by_phi.push_back(finals[1]); // median of three
        }
        CHECK(kl_by_phi[1] <= kl_by_phi[0]);
    }
}
