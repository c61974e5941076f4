//! Dormand–Prince 5(4) integrator with embedded error control.
//!
//! Operates on `Vec<f64>` states so the same stepper drives the radial ODE
//! and the method-of-lines PDE.

/// Right-hand side `dy/dt = f(t, y)`.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]);
    /// Upper bound on the step from `(t, y)`, e.g. an explicit stability limit.
    fn max_step(&self, _t: f64, _y: &[f64]) -> f64 {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    /// Steps below this abort the integration.
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self { rtol: 1e-8, atol: 1e-10, h_init: 1e-3, h_min: 1e-12, max_steps: 10_000_000 }
    }
}

/// What the observer wants after an accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OdeFailure {
    StepTooSmall { t: f64, h: f64 },
    TooManySteps { t: f64 },
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evals: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Fifth-order weights minus embedded fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

impl Dopri5 {
    /// Integrate from `t0` to `t_end`, landing exactly on every entry of
    /// `stops` (sorted, inside `(t0, t_end]`) and on `t_end`. The observer
    /// sees every accepted step; its flag is true on stop times.
    pub fn integrate<S: OdeSystem>(
        &self,
        sys: &S,
        t0: f64,
        y0: &[f64],
        t_end: f64,
        stops: &[f64],
        mut observer: impl FnMut(f64, &[f64], bool) -> Control,
    ) -> Result<Stats, OdeFailure> {
        let n = sys.dim();
        assert_eq!(y0.len(), n, "state length mismatch");
        let mut stats = Stats::default();
        let mut t = t0;
        let mut y = y0.to_vec();
        let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
        let mut tmp = vec![0.0; n];
        let mut y_new = vec![0.0; n];
        sys.rhs(t, &y, &mut k[0]);
        stats.evals += 1;

        let mut targets: Vec<f64> = stops.iter().copied().filter(|&s| s > t0 && s < t_end).collect();
        targets.push(t_end);
        let mut next = 0;
        let mut h = self.h_init.min(t_end - t0);

        while next < targets.len() {
            if stats.accepted + stats.rejected >= self.max_steps {
                return Err(OdeFailure::TooManySteps { t });
            }
            let target = targets[next];
            h = h.min(sys.max_step(t, &y));
            if h < self.h_min {
                return Err(OdeFailure::StepTooSmall { t, h });
            }
            // Land on the target when it is within reach or just beyond.
            let mut hits = false;
            if t + h >= target - 1e-13 * target.abs().max(1.0) {
                h = target - t;
                hits = true;
            }

            let stage = |tmp: &mut [f64], k: &[Vec<f64>], coeffs: &[f64]| {
                for i in 0..n {
                    let mut acc = 0.0;
                    for (j, c) in coeffs.iter().enumerate() {
                        acc += c * k[j][i];
                    }
                    tmp[i] = y[i] + h * acc;
                }
            };
            stage(&mut tmp, &k, &[A21]);
            sys.rhs(t + C2 * h, &tmp, &mut k[1]);
            stage(&mut tmp, &k, &[A31, A32]);
            sys.rhs(t + C3 * h, &tmp, &mut k[2]);
            stage(&mut tmp, &k, &[A41, A42, A43]);
            sys.rhs(t + C4 * h, &tmp, &mut k[3]);
            stage(&mut tmp, &k, &[A51, A52, A53, A54]);
            sys.rhs(t + C5 * h, &tmp, &mut k[4]);
            stage(&mut tmp, &k, &[A61, A62, A63, A64, A65]);
            sys.rhs(t + h, &tmp, &mut k[5]);
            stage(&mut y_new, &k, &[A71, 0.0, A73, A74, A75, A76]);
            sys.rhs(t + h, &y_new, &mut k[6]);
            stats.evals += 6;

            let mut err = 0.0;
            for i in 0..n {
                let e = h * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i] + E7 * k[6][i]);
                let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                err += (e / sc) * (e / sc);
            }
            let err = (err / n as f64).sqrt();

            if err.is_finite() && err <= 1.0 {
                stats.accepted += 1;
                t = if hits { target } else { t + h };
                std::mem::swap(&mut y, &mut y_new);
                k.swap(0, 6);
                if hits {
                    next += 1;
                }
                let at_stop = hits;
                if observer(t, &y, at_stop) == Control::Stop {
                    return Ok(stats);
                }
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                h *= fac;
                if next < targets.len() {
                    h = h.min(targets[next] - t).max(0.0);
                    // A zero gap would only occur on duplicated stops.
                    if h == 0.0 {
                        h = self.h_init;
                    }
                }
            } else {
                stats.rejected += 1;
                let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
                h *= fac;
            }
        }
        Ok(stats)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Decay;
    impl OdeSystem for Decay {
        fn dim(&self) -> usize {
            1
        }
        fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
            dy[0] = -y[0];
        }
    }

    struct Oscillator;
    impl OdeSystem for Oscillator {
        fn dim(&self) -> usize {
            2
        }
        fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
            dy[0] = y[1];
            dy[1] = -y[0];
        }
    }

    #[test]
    fn exponential_decay_to_tolerance() {
        let solver = Dopri5 { rtol: 1e-11, atol: 1e-14, ..Default::default() };
        let mut last = (0.0, 0.0);
        solver
            .integrate(&Decay, 0.0, &[1.0], 5.0, &[], |t, y, _| {
                last = (t, y[0]);
                Control::Continue
            })
            .unwrap();
        assert_eq!(last.0, 5.0);
        assert!((last.1 - (-5f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn lands_on_every_stop() {
        let solver = Dopri5 { rtol: 1e-10, atol: 1e-12, ..Default::default() };
        let stops = [0.5, 1.0, 2.5];
        let mut hit = Vec::new();
        solver
            .integrate(&Oscillator, 0.0, &[0.0, 1.0], 3.0, &stops, |t, y, at| {
                if at {
                    hit.push((t, y[0]));
                }
                Control::Continue
            })
            .unwrap();
        let times: Vec<f64> = hit.iter().map(|p| p.0).collect();
        assert_eq!(times, vec![0.5, 1.0, 2.5, 3.0]);
        for (t, x) in hit {
            assert!((x - t.sin()).abs() < 1e-9);
        }
    }

    #[test]
    fn observer_can_stop_early() {
        let mut count = 0;
        Dopri5::default()
            .integrate(&Decay, 0.0, &[1.0], 100.0, &[], |_, _, _| {
                count += 1;
                if count == 3 {
                    Control::Stop
                } else {
                    Control::Continue
                }
            })
            .unwrap();
        assert_eq!(count, 3);
    }

    struct BlowUp;
    impl OdeSystem for BlowUp {
        fn dim(&self) -> usize {
            1
        }
        fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
            dy[0] = y[0] * y[0];
        }
    }

    #[test]
    fn finite_time_blow_up_starves_the_step() {
        let err = Dopri5::default().integrate(&BlowUp, 0.0, &[1.0], 2.0, &[], |_, _, _| Control::Continue).unwrap_err();
        match err {
            OdeFailure::StepTooSmall { t, .. } => assert!((t - 1.0).abs() < 1e-3, "{t}"),
            other => panic!("{other:?}"),
        }
    }
}
