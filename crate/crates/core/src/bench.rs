//! Synthetic test functions.
//!
//! The two showcase functions (`cliff`, `octopus`) are maximized. The
//! 32-function suite follows the standard definitions of the Surjanovic &
//! Bingham virtual library of simulation experiments and is minimized.
//! Dimensions follow the library's recommendations where it has them;
//! `langer`, `levy`, `perm0db`, `trid` and `permdb` use 2 dimensions,
//! `schwef` and `stybtang` use 6.
//!
//! Known optima list the library's published argmins. Where the library
//! gives only rounded coordinates, the location was polished numerically and
//! the value is the function at that location.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::objective::{Direction, EvalError, Objective};
use crate::space::{SearchSpace, TrialConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct KnownOptimum {
    pub value: f64,
    pub locations: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct BenchmarkFunction {
    pub name: &'static str,
    pub title: &'static str,
    pub domain: Vec<(f64, f64)>,
    pub direction: Direction,
    pub optimum: Option<KnownOptimum>,
    eval: fn(&[f64]) -> f64,
}

impl BenchmarkFunction {
    pub fn dimension(&self) -> usize {
        self.domain.len()
    }

    /// Value at `x`, given in the function's own coordinates.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dimension(), "{}: wrong dimension", self.name);
        (self.eval)(x)
    }

    /// Box search space `x1..xs` over the function's domain.
    pub fn space(&self) -> SearchSpace {
        SearchSpace::unit_box(&self.domain).expect("benchmark domains are valid")
    }
}

impl Objective for BenchmarkFunction {
    fn evaluate(&self, config: &TrialConfig, _trial: usize) -> std::result::Result<f64, EvalError> {
        let x = config
            .numeric()
            .ok_or_else(|| EvalError::Other("benchmark needs numeric parameters".into()))?;
        if x.len() != self.dimension() {
            return Err(EvalError::Other(format!(
                "{} expects {} values, got {}",
                self.name,
                self.dimension(),
                x.len()
            )));
        }
        Ok((self.eval)(&x))
    }
}

fn opt(value: f64, locations: &[&[f64]]) -> Option<KnownOptimum> {
    Some(KnownOptimum {
        value,
        locations: locations.iter().map(|l| l.to_vec()).collect(),
    })
}

fn cube(lo: f64, hi: f64, d: usize) -> Vec<(f64, f64)> {
    vec![(lo, hi); d]
}

pub fn cliff(x: &[f64]) -> f64 {
    let (x1, x2) = (x[0], x[1]);
    (-0.5 * x1 * x1 / 100.0 - 0.5 * (x2 + 0.03 * x1 * x1 - 3.0).powi(2)).exp()
}

pub fn octopus(x: &[f64]) -> f64 {
    let (x1, x2) = (x[0], x[1]);
    2.0 * (10.0 * x1).cos() * (10.0 * x2).sin() + (10.0 * x1 * x2).sin()
}

fn bukin6(x: &[f64]) -> f64 {
    100.0 * (x[1] - 0.01 * x[0] * x[0]).abs().sqrt() + 0.01 * (x[0] + 10.0).abs()
}

fn crossit(x: &[f64]) -> f64 {
    let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
    let inner = (x[0].sin() * x[1].sin() * (100.0 - r / PI).abs().exp()).abs() + 1.0;
    -0.0001 * inner.powf(0.1)
}

fn egg(x: &[f64]) -> f64 {
    let (x1, x2) = (x[0], x[1]);
    -(x2 + 47.0) * (x2 + x1 / 2.0 + 47.0).abs().sqrt().sin()
        - x1 * (x1 - (x2 + 47.0)).abs().sqrt().sin()
}

fn holder(x: &[f64]) -> f64 {
    let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
    -(x[0].sin() * x[1].cos() * (1.0 - r / PI).abs().exp()).abs()
}

const LANGER_A: [[f64; 2]; 5] = [[3.0, 5.0], [5.0, 2.0], [2.0, 1.0], [1.0, 4.0], [7.0, 9.0]];
const LANGER_C: [f64; 5] = [1.0, 2.0, 5.0, 2.0, 3.0];

fn langer(x: &[f64]) -> f64 {
    LANGER_A
        .iter()
        .zip(LANGER_C)
        .map(|(a, c)| {
            let r: f64 = a.iter().zip(x).map(|(ai, xi)| (xi - ai).powi(2)).sum();
            c * (-r / PI).exp() * (PI * r).cos()
        })
        .sum()
}

fn levy(x: &[f64]) -> f64 {
    let w: Vec<f64> = x.iter().map(|v| 1.0 + (v - 1.0) / 4.0).collect();
    let d = w.len();
    let mut sum = (PI * w[0]).sin().powi(2);
    for wi in &w[..d - 1] {
        sum += (wi - 1.0).powi(2) * (1.0 + 10.0 * (PI * wi + 1.0).sin().powi(2));
    }
    sum + (w[d - 1] - 1.0).powi(2) * (1.0 + (2.0 * PI * w[d - 1]).sin().powi(2))
}

fn levy13(x: &[f64]) -> f64 {
    let (x1, x2) = (x[0], x[1]);
    (3.0 * PI * x1).sin().powi(2)
        + (x1 - 1.0).powi(2) * (1.0 + (3.0 * PI * x2).sin().powi(2))
        + (x2 - 1.0).powi(2) * (1.0 + (2.0 * PI * x2).sin().powi(2))
}

fn schwef(x: &[f64]) -> f64 {
    418.9829 * x.len() as f64 - x.iter().map(|v| v * v.abs().sqrt().sin()).sum::<f64>()
}

fn shubert(x: &[f64]) -> f64 {
    let part = |v: f64| -> f64 {
        (1..=5)
            .map(|i| {
                let i = i as f64;
                i * ((i + 1.0) * v + i).cos()
            })
            .sum()
    };
    part(x[0]) * part(x[1])
}

fn booth(x: &[f64]) -> f64 {
    (x[0] + 2.0 * x[1] - 7.0).powi(2) + (2.0 * x[0] + x[1] - 5.0).powi(2)
}

fn mccorm(x: &[f64]) -> f64 {
    (x[0] + x[1]).sin() + (x[0] - x[1]).powi(2) - 1.5 * x[0] + 2.5 * x[1] + 1.0
}

const POWERSUM_B: [f64; 4] = [8.0, 18.0, 44.0, 114.0];

fn powersum(x: &[f64]) -> f64 {
    POWERSUM_B
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let s: f64 = x.iter().map(|v| v.powi(i as i32 + 1)).sum();
            (s - b).powi(2)
        })
        .sum()
}

fn zakharov(x: &[f64]) -> f64 {
    let sq: f64 = x.iter().map(|v| v * v).sum();
    let lin: f64 = x
        .iter()
        .enumerate()
        .map(|(i, v)| 0.5 * (i + 1) as f64 * v)
        .sum();
    sq + lin.powi(2) + lin.powi(4)
}

fn camel6(x: &[f64]) -> f64 {
    let (x1, x2) = (x[0], x[1]);
    (4.0 - 2.1 * x1 * x1 + x1.powi(4) / 3.0) * x1 * x1 + x1 * x2 + (-4.0 + 4.0 * x2 * x2) * x2 * x2
}

fn dixonpr(x: &[f64]) -> f64 {
    let mut sum = (x[0] - 1.0).powi(2);
    for i in 1..x.len() {
        sum += (i + 1) as f64 * (2.0 * x[i] * x[i] - x[i - 1]).powi(2);
    }
    sum
}

fn rosen(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (w[0] - 1.0).powi(2))
        .sum()
}

fn perm0db(x: &[f64]) -> f64 {
    let beta = 10.0;
    let d = x.len();
    (1..=d)
        .map(|i| {
            let inner: f64 = (1..=d)
                .map(|j| {
                    let jf = j as f64;
                    (jf + beta) * (x[j - 1].powi(i as i32) - 1.0 / jf.powi(i as i32))
                })
                .sum();
            inner * inner
        })
        .sum()
}

fn trid(x: &[f64]) -> f64 {
    let a: f64 = x.iter().map(|v| (v - 1.0).powi(2)).sum();
    let b: f64 = x.windows(2).map(|w| w[0] * w[1]).sum();
    a - b
}

fn dejong5(x: &[f64]) -> f64 {
    const GRID: [f64; 5] = [-32.0, -16.0, 0.0, 16.0, 32.0];
    let mut sum = 0.002;
    for i in 0..25 {
        let a1 = GRID[i % 5];
        let a2 = GRID[i / 5];
        sum += 1.0 / ((i + 1) as f64 + (x[0] - a1).powi(6) + (x[1] - a2).powi(6));
    }
    1.0 / sum
}

fn easom(x: &[f64]) -> f64 {
    -x[0].cos() * x[1].cos() * (-(x[0] - PI).powi(2) - (x[1] - PI).powi(2)).exp()
}

fn michal(x: &[f64]) -> f64 {
    -x.iter()
        .enumerate()
        .map(|(i, v)| v.sin() * ((i + 1) as f64 * v * v / PI).sin().powi(20))
        .sum::<f64>()
}

fn beale(x: &[f64]) -> f64 {
    let (x1, x2) = (x[0], x[1]);
    (1.5 - x1 + x1 * x2).powi(2)
        + (2.25 - x1 + x1 * x2 * x2).powi(2)
        + (2.625 - x1 + x1 * x2.powi(3)).powi(2)
}

fn branin(x: &[f64]) -> f64 {
    let b = 5.1 / (4.0 * PI * PI);
    let c = 5.0 / PI;
    let t = 1.0 / (8.0 * PI);
    (x[1] - b * x[0] * x[0] + c * x[0] - 6.0).powi(2) + 10.0 * (1.0 - t) * x[0].cos() + 10.0
}

fn colville(x: &[f64]) -> f64 {
    100.0 * (x[0] * x[0] - x[1]).powi(2)
        + (x[0] - 1.0).powi(2)
        + (x[2] - 1.0).powi(2)
        + 90.0 * (x[2] * x[2] - x[3]).powi(2)
        + 10.1 * ((x[1] - 1.0).powi(2) + (x[3] - 1.0).powi(2))
        + 19.8 * (x[1] - 1.0) * (x[3] - 1.0)
}

fn goldpr(x: &[f64]) -> f64 {
    let (x1, x2) = (x[0], x[1]);
    let a = 1.0
        + (x1 + x2 + 1.0).powi(2)
            * (19.0 - 14.0 * x1 + 3.0 * x1 * x1 - 14.0 * x2 + 6.0 * x1 * x2 + 3.0 * x2 * x2);
    let b = 30.0
        + (2.0 * x1 - 3.0 * x2).powi(2)
            * (18.0 - 32.0 * x1 + 12.0 * x1 * x1 + 48.0 * x2 - 36.0 * x1 * x2 + 27.0 * x2 * x2);
    a * b
}

const HART_ALPHA: [f64; 4] = [1.0, 1.2, 3.0, 3.2];
const HART3_A: [[f64; 3]; 4] = [
    [3.0, 10.0, 30.0],
    [0.1, 10.0, 35.0],
    [3.0, 10.0, 30.0],
    [0.1, 10.0, 35.0],
];
const HART3_P: [[f64; 3]; 4] = [
    [0.3689, 0.1170, 0.2673],
    [0.4699, 0.4387, 0.7470],
    [0.1091, 0.8732, 0.5547],
    [0.0381, 0.5743, 0.8828],
];
const HART6_A: [[f64; 6]; 4] = [
    [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
    [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
    [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
    [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
];
const HART6_P: [[f64; 6]; 4] = [
    [0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886],
    [0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991],
    [0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650],
    [0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381],
];

fn hartmann_sum(x: &[f64], a: &[&[f64]; 4], p: &[&[f64]; 4]) -> f64 {
    (0..4)
        .map(|i| {
            let inner: f64 = x
                .iter()
                .enumerate()
                .map(|(j, v)| a[i][j] * (v - p[i][j]).powi(2))
                .sum();
            HART_ALPHA[i] * (-inner).exp()
        })
        .sum()
}

fn hart3(x: &[f64]) -> f64 {
    let a = [&HART3_A[0][..], &HART3_A[1], &HART3_A[2], &HART3_A[3]];
    let p = [&HART3_P[0][..], &HART3_P[1], &HART3_P[2], &HART3_P[3]];
    -hartmann_sum(x, &a, &p)
}

fn hart4(x: &[f64]) -> f64 {
    let a = [&HART6_A[0][..4], &HART6_A[1][..4], &HART6_A[2][..4], &HART6_A[3][..4]];
    let p = [&HART6_P[0][..4], &HART6_P[1][..4], &HART6_P[2][..4], &HART6_P[3][..4]];
    (1.1 - hartmann_sum(x, &a, &p)) / 0.839
}

fn hart6(x: &[f64]) -> f64 {
    let a = [&HART6_A[0][..], &HART6_A[1], &HART6_A[2], &HART6_A[3]];
    let p = [&HART6_P[0][..], &HART6_P[1], &HART6_P[2], &HART6_P[3]];
    -hartmann_sum(x, &a, &p)
}

fn permdb(x: &[f64]) -> f64 {
    let beta = 0.5;
    let d = x.len();
    (1..=d)
        .map(|i| {
            let inner: f64 = (1..=d)
                .map(|j| {
                    let jf = j as f64;
                    (jf.powi(i as i32) + beta) * ((x[j - 1] / jf).powi(i as i32) - 1.0)
                })
                .sum();
            inner * inner
        })
        .sum()
}

fn powell(x: &[f64]) -> f64 {
    x.chunks(4)
        .map(|c| {
            (c[0] + 10.0 * c[1]).powi(2)
                + 5.0 * (c[2] - c[3]).powi(2)
                + (c[1] - 2.0 * c[2]).powi(4)
                + 10.0 * (c[0] - c[3]).powi(4)
        })
        .sum()
}

const SHEKEL_BETA: [f64; 10] = [0.1, 0.2, 0.2, 0.4, 0.4, 0.6, 0.3, 0.7, 0.5, 0.5];
const SHEKEL_C: [[f64; 10]; 4] = [
    [4.0, 1.0, 8.0, 6.0, 3.0, 2.0, 5.0, 8.0, 6.0, 7.0],
    [4.0, 1.0, 8.0, 6.0, 7.0, 9.0, 3.0, 1.0, 2.0, 3.6],
    [4.0, 1.0, 8.0, 6.0, 3.0, 2.0, 5.0, 8.0, 6.0, 7.0],
    [4.0, 1.0, 8.0, 6.0, 7.0, 9.0, 3.0, 1.0, 2.0, 3.6],
];

fn shekel(x: &[f64]) -> f64 {
    -(0..10)
        .map(|i| {
            let r: f64 = (0..4).map(|j| (x[j] - SHEKEL_C[j][i]).powi(2)).sum();
            1.0 / (r + SHEKEL_BETA[i])
        })
        .sum::<f64>()
}

fn stybtang(x: &[f64]) -> f64 {
    0.5 * x.iter().map(|v| v.powi(4) - 16.0 * v * v + 5.0 * v).sum::<f64>()
}

fn minimize(
    name: &'static str,
    title: &'static str,
    domain: Vec<(f64, f64)>,
    eval: fn(&[f64]) -> f64,
    optimum: Option<KnownOptimum>,
) -> BenchmarkFunction {
    BenchmarkFunction {
        name,
        title,
        domain,
        direction: Direction::Minimize,
        optimum,
        eval,
    }
}

/// Every registered function: `cliff`, `octopus`, then the 32-function suite.
pub fn registry() -> Vec<BenchmarkFunction> {
    let camel = [0.089_842_008_935_272_33, -0.712_656_403_019_058];
    let crossit_c = [1.349_406_668_723_008_4, 1.349_406_663_559_894_7];
    let holder_c = [8.055_023_466_339_607, 9.664_590_027_738_118];
    vec![
        BenchmarkFunction {
            name: "cliff",
            title: "Cliff",
            domain: vec![(-20.0, 20.0), (-10.0, 5.0)],
            direction: Direction::Maximize,
            optimum: opt(1.0, &[&[0.0, 3.0]]),
            eval: cliff,
        },
        BenchmarkFunction {
            name: "octopus",
            title: "Octopus",
            domain: cube(0.0, 1.0, 2),
            direction: Direction::Maximize,
            optimum: opt(2.996_485_444_023_372, &[&[0.315_995_983_705_653_24, 0.472_467_408_803_200_8]]),
            eval: octopus,
        },
        // many local minima
        minimize("bukin6", "Bukin N. 6", vec![(-15.0, -5.0), (-3.0, 3.0)], bukin6, opt(0.0, &[&[-10.0, 1.0]])),
        minimize(
            "crossit",
            "Cross-in-Tray",
            cube(-10.0, 10.0, 2),
            crossit,
            opt(
                -2.062_611_870_822_739_2,
                &[
                    &[crossit_c[0], crossit_c[1]],
                    &[-crossit_c[0], crossit_c[1]],
                    &[crossit_c[0], -crossit_c[1]],
                    &[-crossit_c[0], -crossit_c[1]],
                ],
            ),
        ),
        minimize("egg", "Eggholder", cube(-512.0, 512.0, 2), egg, opt(-959.640_662_720_851, &[&[512.0, 404.231_805_287_830_35]])),
        minimize(
            "holder",
            "Holder Table",
            cube(-10.0, 10.0, 2),
            holder,
            opt(
                -19.208_502_567_886_75,
                &[
                    &[holder_c[0], holder_c[1]],
                    &[-holder_c[0], holder_c[1]],
                    &[holder_c[0], -holder_c[1]],
                    &[-holder_c[0], -holder_c[1]],
                ],
            ),
        ),
        minimize(
            "langer",
            "Langermann",
            cube(0.0, 10.0, 2),
            langer,
            opt(-4.155_809_291_847_786, &[&[2.793_402_209_303_984_3, 1.597_232_499_541_022_8]]),
        ),
        minimize("levy", "Levy", cube(-10.0, 10.0, 2), levy, opt(0.0, &[&[1.0, 1.0]])),
        minimize("levy13", "Levy N. 13", cube(-10.0, 10.0, 2), levy13, opt(0.0, &[&[1.0, 1.0]])),
        minimize(
            "schwef",
            "Schwefel",
            cube(-500.0, 500.0, 6),
            schwef,
            opt(
                7.636_539_703_526_068e-5,
                &[&[
                    420.968_747_282_501_7,
                    420.968_746_379_516,
                    420.968_745_940_740_46,
                    420.968_746_792_142_04,
                    420.968_746_219_612_34,
                    420.968_746_169_881_8,
                ]],
            ),
        ),
        minimize(
            "shubert",
            "Shubert",
            cube(-10.0, 10.0, 2),
            shubert,
            opt(-186.730_908_831_023_92, &[&[4.858_056_880_356_125, -0.800_321_101_733_484_7]]),
        ),
        // plate-shaped
        minimize("booth", "Booth", cube(-10.0, 10.0, 2), booth, opt(0.0, &[&[1.0, 3.0]])),
        minimize(
            "mccorm",
            "McCormick",
            vec![(-1.5, 4.0), (-3.0, 4.0)],
            mccorm,
            opt(-1.913_222_954_981_036_7, &[&[-0.547_197_551_484_209_7, -1.547_197_539_309_708_2]]),
        ),
        minimize("powersum", "Power Sum", cube(0.0, 4.0, 4), powersum, opt(0.0, &[&[1.0, 2.0, 2.0, 3.0]])),
        minimize("zakharov", "Zakharov", cube(-5.0, 10.0, 4), zakharov, opt(0.0, &[&[0.0; 4]])),
        // valley-shaped
        minimize(
            "camel6",
            "Six-Hump Camel",
            vec![(-3.0, 3.0), (-2.0, 2.0)],
            camel6,
            opt(-1.031_628_453_489_877_4, &[&[camel[0], camel[1]], &[-camel[0], -camel[1]]]),
        ),
        minimize(
            "dixonpr",
            "Dixon-Price",
            cube(-10.0, 10.0, 4),
            dixonpr,
            opt(
                0.0,
                &[&[
                    1.0,
                    std::f64::consts::FRAC_1_SQRT_2,
                    0.594_603_557_501_360_5,
                    0.545_253_866_332_628_8,
                ]],
            ),
        ),
        minimize("rosen", "Rosenbrock", cube(-5.0, 10.0, 8), rosen, opt(0.0, &[&[1.0; 8]])),
        // bowl-shaped
        minimize("perm0db", "Perm 0, d, beta", cube(-2.0, 2.0, 2), perm0db, opt(0.0, &[&[1.0, 0.5]])),
        minimize("trid", "Trid", cube(-4.0, 4.0, 2), trid, opt(-2.0, &[&[2.0, 2.0]])),
        // steep ridges or drops
        minimize(
            "dejong5",
            "De Jong N. 5",
            cube(-65.536, 65.536, 2),
            dejong5,
            opt(0.998_003_837_794_449_8, &[&[-31.978_333_571_397_26, -31.978_336_789_414_364]]),
        ),
        minimize("easom", "Easom", cube(-100.0, 100.0, 2), easom, opt(-1.0, &[&[PI, PI]])),
        minimize(
            "michal",
            "Michalewicz",
            cube(0.0, PI, 5),
            michal,
            opt(
                -4.687_658_179_088_149,
                &[&[
                    2.202_905_521_120_755_3,
                    1.570_796_324_182_368_6,
                    1.284_991_567_193_139_8,
                    1.923_058_470_419_011_5,
                    1.720_469_772_537_733_1,
                ]],
            ),
        ),
        // other
        minimize("beale", "Beale", cube(-4.5, 4.5, 2), beale, opt(0.0, &[&[3.0, 0.5]])),
        minimize(
            "branin",
            "Branin",
            vec![(-5.0, 10.0), (0.0, 15.0)],
            branin,
            opt(5.0 / (4.0 * PI), &[&[-PI, 12.275], &[PI, 2.275], &[3.0 * PI, 2.475]]),
        ),
        minimize("colville", "Colville", cube(-10.0, 10.0, 4), colville, opt(0.0, &[&[1.0; 4]])),
        minimize("goldpr", "Goldstein-Price", cube(-2.0, 2.0, 2), goldpr, opt(3.0, &[&[0.0, -1.0]])),
        minimize(
            "hart3",
            "Hartmann 3-D",
            cube(0.0, 1.0, 3),
            hart3,
            opt(-3.862_779_787_332_663, &[&[0.114_588_881_225_412_87, 0.555_648_895_473_937_1, 0.852_546_984_217_274_6]]),
        ),
        minimize(
            "hart4",
            "Hartmann 4-D",
            cube(0.0, 1.0, 4),
            hart4,
            opt(
                -3.134_494_141_222_399,
                &[&[0.187_395_273_997_491_5, 0.194_151_527_668_759_98, 0.557_917_782_843_685_1, 0.264_779_625_453_439_7]],
            ),
        ),
        minimize(
            "hart6",
            "Hartmann 6-D",
            cube(0.0, 1.0, 6),
            hart6,
            opt(
                -3.322_368_011_415_514_7,
                &[&[
                    0.201_689_509_093_657_46,
                    0.150_010_693_541_113_74,
                    0.476_873_972_925_099_8,
                    0.275_332_427_522_078_2,
                    0.311_651_617_239_568_6,
                    0.657_300_534_553_670_2,
                ]],
            ),
        ),
        minimize("permdb", "Perm d, beta", cube(-2.0, 2.0, 2), permdb, opt(0.0, &[&[1.0, 2.0]])),
        minimize("powell", "Powell", cube(-4.0, 5.0, 4), powell, opt(0.0, &[&[0.0; 4]])),
        minimize(
            "shekel",
            "Shekel",
            cube(0.0, 10.0, 4),
            shekel,
            opt(
                -10.536_443_153_483_53,
                &[&[4.000_746_866_658_956, 3.999_509_480_867_588_6, 4.000_746_866_997_999, 3.999_509_482_242_383_6]],
            ),
        ),
        minimize(
            "stybtang",
            "Styblinski-Tang",
            cube(-5.0, 5.0, 6),
            stybtang,
            opt(
                -234.996_994_222_628_47,
                &[&[
                    -2.903_534_026_099_086,
                    -2.903_534_029_333_276,
                    -2.903_534_049_335_610_3,
                    -2.903_534_053_824_653_7,
                    -2.903_534_044_863_947_7,
                    -2.903_533_992_265_046_5,
                ]],
            ),
        ),
    ]
}

pub fn lookup(name: &str) -> Result<BenchmarkFunction> {
    registry()
        .into_iter()
        .find(|f| f.name == name)
        .ok_or_else(|| Error::UnknownBenchmark(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_has_suite_plus_examples() {
        let reg = registry();
        assert_eq!(reg.len(), 34);
        let suite: Vec<_> = reg.iter().filter(|f| f.direction == Direction::Minimize).collect();
        assert_eq!(suite.len(), 32);
        for f in &reg {
            assert_eq!(reg.iter().filter(|g| g.name == f.name).count(), 1);
            assert!((2..=8).contains(&f.dimension()), "{}", f.name);
        }
    }

    #[test]
    fn configured_dimensions() {
        let dims = [
            ("powersum", 4), ("zakharov", 4), ("dixonpr", 4), ("rosen", 8), ("powell", 4),
            ("michal", 5), ("langer", 2), ("levy", 2), ("perm0db", 2), ("trid", 2),
            ("permdb", 2), ("schwef", 6), ("stybtang", 6), ("hart3", 3), ("hart4", 4),
            ("hart6", 6), ("colville", 4), ("shekel", 4),
        ];
        for (name, d) in dims {
            assert_eq!(lookup(name).unwrap().dimension(), d, "{name}");
        }
    }

    #[test]
    fn known_optima_evaluate_to_their_value() {
        for f in registry() {
            let Some(opt) = &f.optimum else { continue };
            for loc in &opt.locations {
                let v = f.evaluate(loc);
                assert!((v - opt.value).abs() < 1e-9, "{}: f({loc:?}) = {v}, expected {}", f.name, opt.value);
                for (x, (lo, hi)) in loc.iter().zip(&f.domain) {
                    assert!(x >= lo && x <= hi, "{} optimum outside domain", f.name);
                }
            }
        }
    }

    #[test]
    fn published_minima() {
        // rounded values as listed by the simulation library
        let published = [
            ("crossit", -2.06261, 1e-5),
            ("egg", -959.6407, 1e-4),
            ("holder", -19.2085, 1e-4),
            ("shubert", -186.7309, 1e-4),
            ("mccorm", -1.9133, 1e-4),
            ("camel6", -1.0316, 1e-4),
            ("dejong5", 0.998, 1e-3),
            ("michal", -4.687658, 1e-6),
            ("branin", 0.397887, 1e-6),
            ("hart3", -3.86278, 1e-5),
            ("hart6", -3.32237, 1e-5),
            ("shekel", -10.5364, 1e-4),
            // the listed per-dimension constant is off in the fifth digit
            ("stybtang", -39.16599 * 6.0, 2e-3),
        ];
        for (name, value, tol) in published {
            let f = lookup(name).unwrap();
            let got = f.optimum.as_ref().unwrap().value;
            assert!((got - value).abs() <= tol, "{name}: {got} vs {value}");
        }
    }

    #[test]
    fn optima_are_local_minima() {
        // no better value in a small neighbourhood (coordinate probes)
        for f in registry() {
            let Some(opt) = &f.optimum else { continue };
            let score = |v: f64| f.direction.score(v);
            for loc in &opt.locations {
                for j in 0..loc.len() {
                    for h in [1e-4, -1e-4] {
                        let mut x = loc.clone();
                        x[j] = (x[j] + h).clamp(f.domain[j].0, f.domain[j].1);
                        assert!(
                            score(f.evaluate(&x)) <= score(opt.value) + 1e-9,
                            "{} improves near {loc:?}",
                            f.name
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn cliff_values() {
        assert_eq!(cliff(&[0.0, 3.0]), 1.0);
        assert!((cliff(&[0.0, -10.0]) - (-84.5f64).exp()).abs() < 1e-300);
    }

    #[test]
    fn octopus_values() {
        assert_eq!(octopus(&[0.0, 0.0]), 0.0);
        assert!((octopus(&[0.0, PI / 20.0]) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn octopus_dense_grid_maximum() {
        let m = 2000;
        let mut best = f64::NEG_INFINITY;
        for i in 0..m {
            for j in 0..m {
                let x = [i as f64 / (m - 1) as f64, j as f64 / (m - 1) as f64];
                best = best.max(octopus(&x));
            }
        }
        assert!((best - 2.996).abs() < 1e-3, "{best}");
        let listed = lookup("octopus").unwrap().optimum.unwrap().value;
        assert!(listed >= best);
    }

    #[test]
    fn booth_minimum() {
        assert_eq!(lookup("booth").unwrap().evaluate(&[1.0, 3.0]), 0.0);
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(lookup("nope"), Err(Error::UnknownBenchmark(_))));
    }
}
