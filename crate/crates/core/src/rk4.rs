//! Classical fixed-step fourth-order Runge–Kutta on fixed-size states.

fn axpy<const N: usize>(y: &[f64; N], h: f64, k: &[f64; N]) -> [f64; N] {
    std::array::from_fn(|i| y[i] + h * k[i])
}

/// One step of size `h` (which may be negative) for `y' = f(t, y)`.
pub fn try_step<const N: usize, E>(
    mut f: impl FnMut(f64, &[f64; N]) -> Result<[f64; N], E>,
    t: f64,
    y: &[f64; N],
    h: f64,
) -> Result<[f64; N], E> {
    let half = 0.5 * h;
    let k1 = f(t, y)?;
    let k2 = f(t + half, &axpy(y, half, &k1))?;
    let k3 = f(t + half, &axpy(y, half, &k2))?;
    let k4 = f(t + h, &axpy(y, h, &k3))?;
    Ok(std::array::from_fn(|i| {
        y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    }))
}

pub fn step<const N: usize>(mut f: impl FnMut(f64, &[f64; N]) -> [f64; N], t: f64, y: &[f64; N], h: f64) -> [f64; N] {
    let r: Result<_, std::convert::Infallible> = try_step(|t, y| Ok(f(t, y)), t, y, h);
    match r {
        Ok(v) => v,
        Err(e) => match e {},
    }
}
