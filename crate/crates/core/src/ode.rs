//! Dormand–Prince 8(5,3) integrator for small non-stiff real systems.
//!
//! Steps are shortened so that every requested output time is hit exactly;
//! no interpolation error enters the sampled values.

use crate::error::{Error, Result};

/// Step-size control parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            max_step: f64::INFINITY,
            max_steps: 10_000_000,
        }
    }
}

const SAFE: f64 = 0.9;
const FAC_MIN: f64 = 0.333;
const FAC_MAX: f64 = 6.0;

/// Integrates `y' = rhs(t, y)` from `(t0, y0)` and returns the state at each
/// time in `grid` (non-decreasing, all `>= t0`).
///
/// `observe` is called after every accepted step with the new state, and may
/// abort the integration by returning an error.
pub fn integrate<const N: usize, F, O>(
    mut rhs: F,
    t0: f64,
    y0: [f64; N],
    grid: &[f64],
    ctl: &StepControl,
    mut observe: O,
) -> Result<Vec<[f64; N]>>
where
    F: FnMut(f64, &[f64; N], &mut [f64; N]) -> Result<()>,
    O: FnMut(f64, &[f64; N]) -> Result<()>,
{
    if !(ctl.rtol > 0.0 && ctl.atol > 0.0) {
        return Err(Error::Domain("integrator tolerances must be positive".into()));
    }
    if !(ctl.max_step > 0.0) {
        return Err(Error::Domain("max step must be positive".into()));
    }
    if grid.windows(2).any(|w| !(w[1] >= w[0])) || grid.first().is_some_and(|&g| !(g >= t0)) {
        return Err(Error::Domain("output grid must be non-decreasing and start at or after t0".into()));
    }
    let mut out = Vec::with_capacity(grid.len());
    let Some(&t_end) = grid.last() else {
        return Ok(out);
    };

    let mut t = t0;
    let mut y = y0;
    let mut k1 = [0.0; N];
    rhs(t, &y, &mut k1)?;

    let mut next = 0;
    while next < grid.len() && grid[next] == t {
        out.push(y);
        next += 1;
    }
    if next == grid.len() {
        return Ok(out);
    }

    let mut h = initial_step(&mut rhs, t, &y, &k1, t_end - t, ctl)?;
    let mut stepper = Stepper::<N>::default();
    let mut last_rejected = false;
    let mut steps = 0usize;

    while next < grid.len() {
        if steps >= ctl.max_steps {
            return Err(Error::Numerical {
                t,
                reason: format!("exceeded {} integration steps", ctl.max_steps),
            });
        }
        steps += 1;

        let target = grid[next];
        let remaining = target - t;
        let lands = h >= remaining;
        let h_try = if lands { remaining } else { h };
        if h_try.abs() <= 16.0 * f64::EPSILON * t.abs().max(1.0) && !lands {
            return Err(Error::Numerical {
                t,
                reason: format!("step size underflow (h = {h_try:e})"),
            });
        }

        let err = stepper.step(&mut rhs, t, &y, &k1, h_try, ctl)?;
        let fac11 = err.powf(0.125);
        let fac = (fac11 / SAFE).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
        let mut h_new = h_try / fac;

        if err <= 1.0 {
            t = if lands { target } else { t + h_try };
            y = stepper.y_new;
            rhs(t, &y, &mut k1)?;
            observe(t, &y)?;
            if last_rejected {
                h_new = h_new.min(h_try);
            }
            last_rejected = false;
            while next < grid.len() && grid[next] == t {
                out.push(y);
                next += 1;
            }
            // a step shortened to hit a grid point says nothing about the
            // natural step size
            h = if lands && h_new >= h_try { h } else { h_new };
        } else {
            h_new = h_try / (1.0 / FAC_MIN).min(fac11 / SAFE);
            last_rejected = true;
            h = h_new;
        }
        h = h.min(ctl.max_step);
        if !h.is_finite() || !y.iter().all(|v| v.is_finite()) {
            return Err(Error::Numerical {
                t,
                reason: "non-finite state or step".into(),
            });
        }
    }
    Ok(out)
}

fn weighted_rms<const N: usize>(v: &[f64; N], scale: &[f64; N]) -> f64 {
    (v.iter().zip(scale).map(|(a, s)| (a / s).powi(2)).sum::<f64>() / N as f64).sqrt()
}

fn initial_step<const N: usize, F>(
    rhs: &mut F,
    t: f64,
    y: &[f64; N],
    f0: &[f64; N],
    span: f64,
    ctl: &StepControl,
) -> Result<f64>
where
    F: FnMut(f64, &[f64; N], &mut [f64; N]) -> Result<()>,
{
    let scale: [f64; N] = std::array::from_fn(|i| ctl.atol + ctl.rtol * y[i].abs());
    let d0 = weighted_rms(y, &scale);
    let d1 = weighted_rms(f0, &scale);
    let mut h0 = if d0 <= 1e-10 || d1 <= 1e-10 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(ctl.max_step).min(span);
    let y1: [f64; N] = std::array::from_fn(|i| y[i] + h0 * f0[i]);
    let mut f1 = [0.0; N];
    rhs(t + h0, &y1, &mut f1)?;
    let diff: [f64; N] = std::array::from_fn(|i| f1[i] - f0[i]);
    let d2 = weighted_rms(&diff, &scale) / h0;
    let dmax = d1.max(d2);
    let h1 = if dmax <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / dmax).powf(1.0 / 8.0)
    };
    Ok((100.0 * h0).min(h1).min(ctl.max_step).min(span).max(f64::MIN_POSITIVE))
}

struct Stepper<const N: usize> {
    k: [[f64; N]; 12],
    y_new: [f64; N],
}

impl<const N: usize> Default for Stepper<N> {
    fn default() -> Self {
        Self {
            k: [[0.0; N]; 12],
            y_new: [0.0; N],
        }
    }
}

impl<const N: usize> Stepper<N> {
    /// One trial step; stores the 8th-order solution in `y_new` and returns
    /// the scaled error norm (accept when `<= 1`).
    fn step<F>(&mut self, rhs: &mut F, t: f64, y: &[f64; N], k1: &[f64; N], h: f64, ctl: &StepControl) -> Result<f64>
    where
        F: FnMut(f64, &[f64; N], &mut [f64; N]) -> Result<()>,
    {
        self.k[0] = *k1;
        // stages 2..=12; stage 12 is evaluated at t + h
        for s in 1..12 {
            let row = A[s];
            let mut ys = *y;
            for (j, &a) in row.iter().enumerate().take(s) {
                if a != 0.0 {
                    let kj = &self.k[j];
                    for i in 0..N {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            let mut ks = [0.0; N];
            rhs(t + C[s] * h, &ys, &mut ks)?;
            self.k[s] = ks;
        }

        let k = &self.k;
        let mut err5 = 0.0;
        let mut err3 = 0.0;
        for i in 0..N {
            let incr: f64 = (0..12).map(|j| B[j] * k[j][i]).sum();
            let y_new = y[i] + h * incr;
            self.y_new[i] = y_new;
            let sk = ctl.atol + ctl.rtol * y[i].abs().max(y_new.abs());
            let e3 = incr - BHH1 * k[0][i] - BHH2 * k[8][i] - BHH3 * k[11][i];
            let e5: f64 = (0..12).map(|j| ER[j] * k[j][i]).sum();
            err3 += (e3 / sk).powi(2);
            err5 += (e5 / sk).powi(2);
        }
        let mut deno = err5 + 0.01 * err3;
        if deno <= 0.0 {
            deno = 1.0;
        }
        Ok(h.abs() * err5 * (1.0 / (deno * N as f64)).sqrt())
    }
}

// Dormand & Prince 8(5,3) tableau (Hairer, Nørsett & Wanner), stages 1..=12.
const C: [f64; 12] = [
    0.0,
    0.526001519587677318785587544488E-01,
    0.789002279381515978178381316732E-01,
    0.118350341907227396726757197510E+00,
    0.281649658092772603273242802490E+00,
    0.333333333333333333333333333333E+00,
    0.25E+00,
    0.307692307692307692307692307692E+00,
    0.651282051282051282051282051282E+00,
    0.6E+00,
    0.857142857142857142857142857142E+00,
    1.0,
];

const A: [[f64; 12]; 12] = [
    [0.0; 12],
    [5.26001519587677318785587544488E-2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.97250569845378994544595329183E-2, 5.91751709536136983633785987549E-2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [2.95875854768068491816892993775E-2, 0.0, 8.87627564304205475450678981324E-2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [
        2.41365134159266685502369798665E-1,
        0.0,
        -8.84549479328286085344864962717E-1,
        9.24834003261792003115737966543E-1,
        0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
    ],
    [
        3.7037037037037037037037037037E-2,
        0.0,
        0.0,
        1.70828608729473871279604482173E-1,
        1.25467687566822425016691814123E-1,
        0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
    ],
    [
        3.7109375E-2,
        0.0,
        0.0,
        1.70252211019544039314978060272E-1,
        6.02165389804559606850219397283E-2,
        -1.7578125E-2,
        0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
    ],
    [
        3.70920001185047927108779319836E-2,
        0.0,
        0.0,
        1.70383925712239993810214054705E-1,
        1.07262030446373284651809199168E-1,
        -1.53194377486244017527936158236E-2,
        8.27378916381402288758473766002E-3,
        0.0, 0.0, 0.0, 0.0, 0.0,
    ],
    [
        6.24110958716075717114429577812E-1,
        0.0,
        0.0,
        -3.36089262944694129406857109825E0,
        -8.68219346841726006818189891453E-1,
        2.75920996994467083049415600797E1,
        2.01540675504778934086186788979E1,
        -4.34898841810699588477366255144E1,
        0.0, 0.0, 0.0, 0.0,
    ],
    [
        4.77662536438264365890433908527E-1,
        0.0,
        0.0,
        -2.48811461997166764192642586468E0,
        -5.90290826836842996371446475743E-1,
        2.12300514481811942347288949897E1,
        1.52792336328824235832596922938E1,
        -3.32882109689848629194453265587E1,
        -2.03312017085086261358222928593E-2,
        0.0, 0.0, 0.0,
    ],
    [
        -9.3714243008598732571704021658E-1,
        0.0,
        0.0,
        5.18637242884406370830023853209E0,
        1.09143734899672957818500254654E0,
        -8.14978701074692612513997267357E0,
        -1.85200656599969598641566180701E1,
        2.27394870993505042818970056734E1,
        2.49360555267965238987089396762E0,
        -3.0467644718982195003823669022E0,
        0.0, 0.0,
    ],
    [
        2.27331014751653820792359768449E0,
        0.0,
        0.0,
        -1.05344954667372501984066689879E1,
        -2.00087205822486249909675718444E0,
        -1.79589318631187989172765950534E1,
        2.79488845294199600508499808837E1,
        -2.85899827713502369474065508674E0,
        -8.87285693353062954433549289258E0,
        1.23605671757943030647266201528E1,
        6.43392746015763530355970484046E-1,
        0.0,
    ],
];

const B: [f64; 12] = [
    5.42937341165687622380535766363E-2,
    0.0,
    0.0,
    0.0,
    0.0,
    4.45031289275240888144113950566E0,
    1.89151789931450038304281599044E0,
    -5.8012039600105847814672114227E0,
    3.1116436695781989440891606237E-1,
    -1.52160949662516078556178806805E-1,
    2.01365400804030348374776537501E-1,
    4.47106157277725905176885569043E-2,
];

const BHH1: f64 = 0.244094488188976377952755905512E+00;
const BHH2: f64 = 0.733846688281611857341361741547E+00;
const BHH3: f64 = 0.220588235294117647058823529412E-01;

const ER: [f64; 12] = [
    0.1312004499419488073250102996E-01,
    0.0,
    0.0,
    0.0,
    0.0,
    -0.1225156446376204440720569753E+01,
    -0.4957589496572501915214079952E+00,
    0.1664377182454986536961530415E+01,
    -0.3503288487499736816886487290E+00,
    0.3341791187130174790297318841E+00,
    0.8192320648511571246570742613E-01,
    -0.2235530786388629525884427845E-01,
];
