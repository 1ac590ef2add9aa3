//! Analytic gradients against central finite differences.

use lowdens_core::data::{generate, RingWorld};
use lowdens_core::diffusion::NoiseSchedule;
use lowdens_core::guidance::{fit_class_model, hardness_with_grad, loss_g1, loss_g1_logit, loss_g2, ClassModelGrid, LossGrad};
use lowdens_core::nn::{Architecture, Cond, MicroNet};
use lowdens_core::rng::{normal_vec, stream_rng, Stream};
use rand::Rng;

const H: f64 = 1e-5;
const TOL: f64 = 1e-4;

fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let scale = a.iter().map(|v| v * v).sum::<f64>().sqrt().max(b.iter().map(|v| v * v).sum::<f64>().sqrt());
    if scale < 1e-12 {
        diff
    } else {
        diff / scale
    }
}

fn central(f: &dyn Fn(&[f64]) -> f64, x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let mut p = x.to_vec();
            let mut m = x.to_vec();
            p[i] += H;
            m[i] -= H;
            (f(&p) - f(&m)) / (2.0 * H)
        })
        .collect()
}

/// Random network of depth 1..=4 and one of the three roles.
fn random_net(c: u64) -> (MicroNet, Cond<'static>) {
    let mut rng = stream_rng(c, Stream::Init, 7, 0);
    let depth = 1 + (c as usize % 4);
    let hidden = rng.random_range(3..10);
    let s = rng.random_range(0.0..1.0);
    match c % 3 {
        0 => (MicroNet::new(&Architecture::denoiser(2, 4, hidden, depth), c).unwrap(), Cond::time_label(s, (c % 4) as usize)),
        1 => (MicroNet::new(&Architecture::embedder(2, 4, hidden, depth, 5), c).unwrap(), Cond::time(s)),
        _ => (MicroNet::new(&Architecture::discriminator(2, hidden, depth), c).unwrap(), Cond::time(s)),
    }
}

#[test]
fn network_input_and_parameter_gradients() {
    for c in 0..24u64 {
        let (mut net, cond) = random_net(c);
        let x = normal_vec(c, Stream::Data, 1, 0, 2);
        let w = normal_vec(c, Stream::Data, 2, 0, net.output_dim());
        let objective = |net: &MicroNet, x: &[f64]| -> f64 {
            net.forward(x, &cond).unwrap().output().iter().zip(&w).map(|(o, w)| o * w).sum()
        };
        let cache = net.forward(&x, &cond).unwrap();
        let gx = net.grad_input(&cache, &w).unwrap();
        let fx = central(&|p| objective(&net, p), &x);
        assert!(rel_err(&gx, &fx) < TOL, "config {c}: input gradient error {}", rel_err(&gx, &fx));

        let gp = net.grad_params(&cache, &w).unwrap().flatten();
        let theta = net.parameters();
        let fp: Vec<f64> = (0..theta.len())
            .map(|i| {
                let mut eval = |d: f64| {
                    let mut t = theta.clone();
                    t[i] += d;
                    net.set_parameters(&t).unwrap();
                    objective(&net, &x)
                };
                (eval(H) - eval(-H)) / (2.0 * H)
            })
            .collect();
        net.set_parameters(&theta).unwrap();
        assert!(rel_err(&gp, &fp) < TOL, "config {c}: parameter gradient error {}", rel_err(&gp, &fp));
    }
}

#[test]
fn embedding_layer_gradient() {
    for c in 0..20u64 {
        let depth = 1 + (c as usize % 4);
        let net = MicroNet::new(&Architecture::embedder(2, 3, 6, depth, 4), 40 + c).unwrap();
        let cond = Cond::time(0.3);
        let x = normal_vec(c, Stream::Data, 3, 0, 2);
        let w = normal_vec(c, Stream::Data, 4, 0, 4);
        let cache = net.embed(&x, &cond).unwrap();
        let g = net.grad_input(&cache, &w).unwrap();
        let f = central(&|p| net.embed(p, &cond).unwrap().output().iter().zip(&w).map(|(a, b)| a * b).sum(), &x);
        assert!(rel_err(&g, &f) < TOL);
    }
}

fn check_loss(name: &str, c: u64, f: &dyn Fn(&[f64]) -> LossGrad, x: &[f64]) {
    let g = f(x).grad;
    let fd = central(&|p| f(p).value, x);
    let e = rel_err(&g, &fd);
    assert!(e < TOL, "{name}, config {c}: relative error {e}");
}

#[test]
fn guiding_loss_gradients() {
    let specs = RingWorld::default().specs().unwrap();
    let schedule = NoiseSchedule::linear(100, 5e-4, 0.2).unwrap();
    for c in 0..24u64 {
        let mut rng = stream_rng(c, Stream::Init, 11, 0);
        let depth = 1 + (c as usize % 4);
        let emb = MicroNet::new(&Architecture::embedder(2, 4, rng.random_range(4..12), depth, 6), 100 + c).unwrap();
        let disc = MicroNet::new(&Architecture::discriminator(2, rng.random_range(4..12), depth), 200 + c).unwrap();
        let pts = generate(&specs, 25, c).unwrap();
        let t = rng.random_range(0..=100);
        // both sides of the identity-precision band
        let grid = ClassModelGrid::fit(&emb, &pts, &schedule, 5, c).unwrap();
        let model = if c % 2 == 0 { fit_class_model(&emb, &pts, t, &schedule, c).unwrap() } else { grid.model_for(t).clone() };
        let x: Vec<f64> = normal_vec(c, Stream::Data, 5, 0, 2).iter().map(|v| 2.5 * v).collect();
        let y = rng.random_range(0..4);
        let tau = rng.random_range(0.25..3.0);
        check_loss("L_g1", c, &|p| loss_g1(&model, &emb, p, y, tau, t, 100).unwrap(), &x);
        check_loss("L_g1 logit", c, &|p| loss_g1_logit(&emb, p, y, tau, t, 100).unwrap(), &x);
        check_loss("L_g2", c, &|p| loss_g2(&disc, p, tau, t, 100).unwrap(), &x);
        check_loss("hardness", c, &|p| hardness_with_grad(&model, &emb, p, y, t, 100).unwrap(), &x);
    }
}
