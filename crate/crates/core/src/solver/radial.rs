//! Rotationally symmetric solutions by shooting on the radial ODE.

use std::cell::RefCell;
use std::io::Write;

use ode_solvers::{Dopri5, OutputType, System, Vector2};

use crate::error::{Error, Result};
use crate::geometry::{radial_jet, AmbientModel};
use crate::numfmt::g17;
use crate::symmfunc::CurvatureFunction;

#[derive(Debug, Clone, PartialEq)]
pub struct RadialOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Taylor start offset from the axis, relative to the boundary radius.
    pub axis_offset: f64,
    /// Profiles with `|u′|` above this are treated as turning vertical.
    pub max_slope: f64,
    pub max_bisections: usize,
}

impl Default for RadialOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-13,
            atol: 1e-15,
            axis_offset: 1e-5,
            max_slope: 1e8,
            max_bisections: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub model: AmbientModel,
    pub k: f64,
    pub boundary_radius: f64,
    pub boundary_height: f64,
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub d2u: Vec<f64>,
    pub kappa_radial: Vec<f64>,
    pub kappa_angular: Vec<f64>,
}

impl RadialProfile {
    pub fn apex_height(&self) -> f64 {
        self.u[0]
    }

    /// `u′(a)²`.
    pub fn boundary_slope_sq(&self) -> f64 {
        let d = *self.du.last().expect("profile has nodes");
        d * d
    }

    /// Writes `r,u,du,d2u,kappa_radial,kappa_angular` rows.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "r,u,du,d2u,kappa_radial,kappa_angular")?;
        for j in 0..self.r.len() {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                g17(self.r[j]),
                g17(self.u[j]),
                g17(self.du[j]),
                g17(self.d2u[j]),
                g17(self.kappa_radial[j]),
                g17(self.kappa_angular[j])
            )?;
        }
        Ok(())
    }
}

/// Radial principal curvature `x` with `f(x, a, …, a) = k`.
fn solve_radial_curvature(f: &CurvatureFunction, k: f64, angular: f64) -> Result<f64> {
    let n = f.dim();
    if n == 1 {
        return Ok(k);
    }
    if !(angular > 0.0) {
        return Err(Error::Admissibility {
            node: 0,
            min_eigenvalue: angular,
        });
    }
    let eval = |x: f64| -> Result<(f64, f64)> {
        let mut v = vec![angular; n];
        v[0] = x;
        Ok((f.eval(&v)? - k, f.gradient(&v)?[0]))
    };
    let mut lo = 0.0;
    let mut hi = k.max(angular);
    let cap = 1e12 * hi;
    while eval(hi)?.0 <= 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > cap {
            return Err(Error::NonExistence(format!(
                "no radial curvature reaches {k} with angular curvature {angular}"
            )));
        }
    }
    // safeguarded Newton inside the bracket
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (g, dg) = eval(x)?;
        if g == 0.0 {
            return Ok(x);
        }
        if g < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - g / dg;
        let next = if dg > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs() || hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

/// `u″` from the curvature equation at `(r, u, u′)`.
fn second_derivative(
    model: AmbientModel,
    f: &CurvatureFunction,
    k: f64,
    r: f64,
    u: f64,
    du: f64,
) -> Result<f64> {
    let w = (1.0 + du * du).sqrt();
    let ea = -du / (r * w);
    match model {
        AmbientModel::Euclidean => {
            let kr = solve_radial_curvature(f, k, ea)?;
            Ok(-w * w * w * kr)
        }
        AmbientModel::HyperbolicHalfSpace => {
            if !(u > 0.0) {
                return Err(Error::Precondition(format!("profile reached height {u}")));
            }
            let kr = solve_radial_curvature(f, k, 1.0 / w - u * ea)?;
            let er = (1.0 / w - kr) / u;
            Ok(-w * w * w * er)
        }
    }
}

fn axis_second_derivative(model: AmbientModel, k: f64, apex: f64) -> f64 {
    match model {
        AmbientModel::Euclidean => -k,
        AmbientModel::HyperbolicHalfSpace => (k - 1.0) / apex,
    }
}

struct RadialOde<'a> {
    model: AmbientModel,
    f: &'a CurvatureFunction,
    k: f64,
    max_slope: f64,
    failure: &'a RefCell<Option<String>>,
}

impl System<f64, Vector2<f64>> for RadialOde<'_> {
    fn system(&self, r: f64, y: &Vector2<f64>, dy: &mut Vector2<f64>) {
        dy[0] = y[1];
        dy[1] = 0.0;
        if self.failure.borrow().is_some() {
            return;
        }
        if !(y[1].abs() < self.max_slope) {
            *self.failure.borrow_mut() = Some(format!("profile turns vertical near r = {r}"));
            return;
        }
        match second_derivative(self.model, self.f, self.k, r, y[0], y[1]) {
            Ok(v) => dy[1] = v,
            Err(e) => *self.failure.borrow_mut() = Some(format!("at r = {r}: {e}")),
        }
    }

    fn solout(&mut self, _r: f64, _y: &Vector2<f64>, _dy: &Vector2<f64>) -> bool {
        self.failure.borrow().is_some()
    }
}

/// States `(u, u′)` at each radius, starting from apex height `apex`.
fn shoot(
    model: AmbientModel,
    f: &CurvatureFunction,
    k: f64,
    apex: f64,
    radii: &[f64],
    opts: &RadialOptions,
) -> Result<Vec<[f64; 2]>> {
    let a = *radii.last().expect("radii non-empty");
    let r0 = opts.axis_offset * a;
    let c2 = axis_second_derivative(model, k, apex);
    let mut state = Vector2::new(apex + 0.5 * c2 * r0 * r0, c2 * r0);
    let mut r = r0;
    let mut out = Vec::with_capacity(radii.len());
    for &target in radii {
        if target == 0.0 {
            out.push([apex, 0.0]);
            continue;
        }
        let failure = RefCell::new(None);
        let ode = RadialOde {
            model,
            f,
            k,
            max_slope: opts.max_slope,
            failure: &failure,
        };
        let mut solver = Dopri5::from_param(
            ode,
            r,
            target,
            target - r,
            state,
            opts.rtol,
            opts.atol,
            0.9,
            0.04,
            0.2,
            10.0,
            target - r,
            0.0,
            100_000,
            // the axis term makes early steps look stiff; it is not
            u32::MAX,
            OutputType::Sparse,
        );
        let integrated = solver.integrate();
        if let Some(msg) = failure.borrow_mut().take() {
            return Err(Error::NonExistence(msg));
        }
        integrated.map_err(|e| Error::NonExistence(format!("integration failed: {e}")))?;
        let last = solver
            .y_out()
            .last()
            .copied()
            .ok_or_else(|| Error::NonExistence("integrator produced no output".into()))?;
        let reached = solver.x_out().last().copied().unwrap_or(r);
        if (reached - target).abs() > 1e-12 * target.max(1.0) {
            return Err(Error::NonExistence(format!(
                "integration stopped at r = {reached} before {target}"
            )));
        }
        state = last;
        r = target;
        out.push([state[0], state[1]]);
    }
    Ok(out)
}

pub fn radial_solve(
    model: AmbientModel,
    f: &CurvatureFunction,
    k: f64,
    boundary_radius: f64,
    boundary_height: f64,
    m: usize,
) -> Result<RadialProfile> {
    radial_solve_with(model, f, k, boundary_radius, boundary_height, m, &RadialOptions::default())
}

/// Shooting on the apex height so that `u(a) = boundary_height`.
pub fn radial_solve_with(
    model: AmbientModel,
    f: &CurvatureFunction,
    k: f64,
    boundary_radius: f64,
    boundary_height: f64,
    m: usize,
    opts: &RadialOptions,
) -> Result<RadialProfile> {
    if m < 2 {
        return Err(Error::Argument(format!("radial profile needs at least 2 nodes, got {m}")));
    }
    if !(boundary_radius > 0.0) || !boundary_height.is_finite() {
        return Err(Error::Argument("boundary radius must be positive".into()));
    }
    if !(k > 0.0) {
        return Err(Error::Argument(format!("curvature {k} must be positive")));
    }
    if model == AmbientModel::HyperbolicHalfSpace {
        if k >= 1.0 {
            return Err(Error::Argument(format!(
                "hyperbolic radial solve needs k in (0, 1), got {k}"
            )));
        }
        if !(boundary_height > 0.0) {
            return Err(Error::Argument("hyperbolic boundary height must be positive".into()));
        }
    }
    let a = boundary_radius;
    let radii: Vec<f64> = (0..m).map(|j| a * j as f64 / (m - 1) as f64).collect();
    let end = |c: f64| shoot(model, f, k, c, &radii[radii.len() - 1..], opts).map(|s| s[0][0]);
    let apex = match model {
        AmbientModel::Euclidean => {
            // translation invariance: one shot fixes the apex
            boundary_height - end(0.0)?
        }
        AmbientModel::HyperbolicHalfSpace => {
            let b = boundary_height;
            let above = |c: f64| end(c).map(|v| v > b).unwrap_or(false);
            let mut hi = b.max(a);
            let mut tries = 0;
            while !above(hi) {
                hi *= 2.0;
                tries += 1;
                if tries > 60 {
                    return Err(Error::NonExistence(format!(
                        "no apex height brackets boundary height {b}"
                    )));
                }
            }
            let mut lo = hi;
            tries = 0;
            while above(lo) {
                lo *= 0.5;
                tries += 1;
                if tries > 200 {
                    return Err(Error::NonExistence("apex bracket has no lower end".into()));
                }
            }
            for _ in 0..opts.max_bisections {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if above(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        }
    };
    let states = shoot(model, f, k, apex, &radii, opts)?;
    let mut profile = RadialProfile {
        model,
        k,
        boundary_radius: a,
        boundary_height,
        r: radii.clone(),
        u: Vec::with_capacity(m),
        du: Vec::with_capacity(m),
        d2u: Vec::with_capacity(m),
        kappa_radial: Vec::with_capacity(m),
        kappa_angular: Vec::with_capacity(m),
    };
    for (j, s) in states.iter().enumerate() {
        let r = radii[j];
        let d2 = if r == 0.0 {
            axis_second_derivative(model, k, apex)
        } else {
            second_derivative(model, f, k, r, s[0], s[1])?
        };
        let rc = radial_jet(model, f, r, s[0], s[1], d2)?;
        profile.u.push(s[0]);
        profile.du.push(s[1]);
        profile.d2u.push(d2);
        profile.kappa_radial.push(rc.kappa_radial);
        profile.kappa_angular.push(rc.kappa_angular);
    }
    Ok(profile)
}
