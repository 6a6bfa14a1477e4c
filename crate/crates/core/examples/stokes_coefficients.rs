//! Stokes coefficients of a triaxial ellipsoid, closed form against quadrature.

use spinlock::bodies::{stokes_closed_form, stokes_quadrature, BodyShape};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let body = BodyShape::from_semi_axes(1.0, 1.3, 1.0, 0.8)?;
    println!("moments A, B, C = {:?}", body.moments());
    println!("d = {:.6}, q = {:.6}", body.d(), body.q());
    println!("{:>3} {:>3} {:>16} {:>16} {:>10}", "l", "m", "closed form", "quadrature", "rel err");
    for (l, m) in [(0, 0), (2, 0), (2, 2), (4, 0), (4, 2), (4, 4)] {
        let a = stokes_closed_form(&body, l, m)?.value;
        let b = stokes_quadrature(&body, l, m)?.value;
        println!("{l:3} {m:3} {a:16.10e} {b:16.10e} {:10.2e}", ((a - b) / a).abs());
    }
    let z6 = stokes_quadrature(&body, 6, 2)?.value;
    println!("degree 6 by quadrature only: Z(6,2) = {z6:.10e}");
    Ok(())
}
