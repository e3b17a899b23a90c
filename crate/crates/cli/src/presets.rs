//! Named experiment presets. Each is a partial config document merged over
//! the defaults; `--config` and `--set` apply on top.

use serde_json::{json, Value};

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    build: fn() -> Value,
}

impl Preset {
    pub fn config(&self) -> Value {
        (self.build)()
    }
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "integrator-comparison",
        description: "series integrators of order 3, 5, 7 and RK45 on T*SO(3), dt 0.1, 10^4 steps",
        build: integrator_comparison,
    },
    Preset {
        name: "symmetry-comparison",
        description: "symmetric vs non-symmetric learning on T*SO(3) over four (dt, N) rows and three seeds",
        build: symmetry_comparison,
    },
    Preset {
        name: "poisson-learning",
        description: "Lie-Poisson learning on so(3)* for three step sizes and N = 25, 200",
        build: poisson_learning,
    },
    Preset {
        name: "geometrize-euler",
        description: "Poisson surrogate of forward Euler (dt 0.05) compared over 1000 steps",
        build: geometrize_euler,
    },
    Preset {
        name: "noise-robustness",
        description: "T*SO(3) training data with additive noise of variance 0.05",
        build: noise_robustness,
    },
    Preset {
        name: "reduction-errors",
        description: "error of the reduced pair under input noise, 20 pairs",
        build: reduction_errors,
    },
    Preset {
        name: "convergence-orders",
        description: "global error against step size for the series integrators",
        build: convergence_orders,
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

fn integrator_comparison() -> Value {
    json!({
        "kind": "simulate",
        "name": "integrator-comparison",
        "simulate": {
            "space": "tg",
            "integrators": ["series-3", "series-5", "series-7", "rk45"],
            "mu0": [1.0, 0.5, 0.75],
            "dt": 0.1,
            "steps": 10000,
            "rtol": 1e-3,
            "atol": 1e-6
        }
    })
}

fn symmetry_comparison() -> Value {
    json!({
        "kind": "train",
        "name": "symmetry-comparison",
        "data": {"space": "tg", "generator": "series-7", "seed": 100, "test_n": 100, "test_seed": 9999},
        "model": {"hidden": [500, 500]},
        "train": {"steps": 1000},
        "grid": {
            "rows": [{"dt": 0.05, "n": 100}, {"dt": 0.05, "n": 500}, {"dt": 0.1, "n": 500}, {"dt": 0.1, "n": 1500}],
            "models": ["symmetric", "non-symmetric"],
            "seeds": [0, 1, 2]
        }
    })
}

fn poisson_learning() -> Value {
    json!({
        "kind": "train",
        "name": "poisson-learning",
        "data": {"space": "lp", "generator": "series-7", "region": {"lo": [-2.0, -2.0, -2.0], "hi": [2.0, 2.0, 2.0]}, "seed": 7, "test_n": 100, "test_seed": 9999},
        "model": {"kind": "poisson", "hidden": [50, 10]},
        "train": {"steps": 3000},
        "grid": {
            "rows": [
                {"dt": 0.25, "n": 25}, {"dt": 0.25, "n": 200},
                {"dt": 0.5, "n": 25}, {"dt": 0.5, "n": 200},
                {"dt": 1.0, "n": 25}, {"dt": 1.0, "n": 200}
            ],
            "models": ["poisson"],
            "seeds": [0]
        }
    })
}

fn geometrize_euler() -> Value {
    json!({
        "kind": "geometrize",
        "name": "geometrize-euler",
        "data": {"space": "lp", "generator": "euler", "dt": 0.05, "n": 1000, "seed": 11, "region": {"lo": [-2.5, -2.5, -2.5], "hi": [2.5, 2.5, 2.5]}},
        "model": {"kind": "poisson", "hidden": [50, 10]},
        "train": {"steps": 2000},
        "geometrize": {"mu0": [2.0, 0.5, 1.0], "steps": 1000}
    })
}

fn noise_robustness() -> Value {
    json!({
        "kind": "generate-data",
        "name": "noise-robustness",
        "data": {"space": "tg", "generator": "series-7", "dt": 0.15, "n": 1000, "seed": 5, "sigma2": 0.05, "noise_seed": 6}
    })
}

fn reduction_errors() -> Value {
    json!({
        "kind": "error-scaling",
        "name": "reduction-errors",
        "data": {"space": "tg", "generator": "series-7", "dt": 0.1, "seed": 90},
        "error_scaling": {"pairs": 20, "epsilons": [0.0, 1e-4, 3e-4, 1e-3, 3e-3, 1e-2], "seed": 0}
    })
}

fn convergence_orders() -> Value {
    json!({
        "kind": "order-study",
        "name": "convergence-orders",
        "order_study": {"integrators": ["series-3", "series-5", "series-7", "euler"], "dts": [0.5, 0.25, 0.125, 0.0625], "horizon": 10.0}
    })
}
