//! Built-in definition files.

use std::fmt::Write as _;

pub const NAMES: [&str; 8] = [
    "r2n",
    "sphere",
    "prolongation-so3",
    "bisection",
    "lsa2",
    "semidirect-lsa2",
    "parakahler-lsa2",
    "twist-r2",
];

const SPHERE: &str = "\
# Leafwise structure of the Poisson bivector x p_y^p_z + y p_z^p_x + z p_x^p_y
# on the chart y != 0.
[meta]
name = sphere

[chart]
coords = x, y, z

[frame]
names = e1, e2

[anchor]
e1 = y*p_x - x*p_y
e2 = z*p_y - y*p_z

[bracket]
e1, e2 = -z/y*e1 - x/y*e2

[form]
e1, e2 = y

[star]
e1, e2 = -z/(2*y)*e1 - x/(2*y)*e2
e2, e1 = z/(2*y)*e1 + x/(2*y)*e2

[pairing]
e1, e2 = y
";

const PROLONGATION: &str = "\
# Prolongation of so(3) over its dual: t_a lift the Lie algebra basis,
# b_a = p_ya are vertical.
[meta]
name = prolongation-so3

[chart]
coords = y1, y2, y3

[frame]
names = t1, t2, t3, b1, b2, b3

[anchor]
b1 = p_y1
b2 = p_y2
b3 = p_y3

[bracket]
t1, t2 = t3
t2, t3 = t1
t3, t1 = t2

[form]
t1, b1 = 1
t2, b2 = 1
t3, b3 = 1
t1, t2 = y3
t2, t3 = y1
t3, t1 = y2
";

const BISECTION: &str = "\
# Cotangent algebroid of the Poisson bivector (1 + x^2) p_x^p_y.
[meta]
name = bisection

[chart]
coords = x, y

[frame]
names = dx, dy

[anchor]
dx = (1 + x^2)*p_y
dy = -(1 + x^2)*p_x

[bracket]
dx, dy = 2*x*dx

[form]
dx, dy = 1 + x^2

[star]
dx, dy = x*dx
dy, dx = -x*dx

[pairing]
dx, dy = 1 + x^2
";

const LSA2: &str = "\
[meta]
name = lsa2

[frame]
names = e1, e2

[algebra]
e1, e2 = e2
";

const SEMIDIRECT_LSA2: &str = "\
[meta]
name = semidirect-lsa2

[frame]
names = e1, e2, e1_dual, e2_dual

[star]
e1, e2 = e2
e1, e2_dual = -e2_dual
e2, e2_dual = e1_dual
e2_dual, e2 = e1_dual

[pairing]
e1, e1_dual = -1
e2, e2_dual = -1
";

const TWIST_R2: &str = "\
# Coordinate-flat plane twisted by phi, together with the splitting that
# untwists it.
[meta]
name = twist-r2

[chart]
coords = x, y
funcs = h
max_order = 3

[connection]

[phi]
x, x = -d(h,y)*dy
y, x = d(h,y)*dx

[splitting]
x = p_x - h*dx
y = p_y
";

/// The tangent algebroid of R^2n with the standard pairing, as a star file.
pub fn r2n(n: usize) -> String {
    let coords: Vec<String> = (1..=2 * n).map(|i| format!("x{i}")).collect();
    let frame: Vec<String> = coords.iter().map(|c| format!("p_{c}")).collect();
    let mut out = String::new();
    let _ = writeln!(out, "[meta]\nname = r{}\n", 2 * n);
    let _ = writeln!(out, "[chart]\ncoords = {}\n", coords.join(", "));
    let _ = writeln!(out, "[frame]\nnames = {}\n", frame.join(", "));
    out.push_str("[anchor]\n");
    for f in &frame {
        let _ = writeln!(out, "{f} = {f}");
    }
    out.push_str("\n[star]\n\n[pairing]\n");
    for i in 0..n {
        let _ = writeln!(out, "{}, {} = 1", frame[i], frame[n + i]);
    }
    out
}

/// The source text of a built-in fixture.
pub fn get(name: &str) -> Option<String> {
    Some(match name {
        "r2n" => r2n(2).replace("name = r4", "name = r2n"),
        "sphere" => SPHERE.into(),
        "prolongation-so3" => PROLONGATION.into(),
        "bisection" => BISECTION.into(),
        "lsa2" => LSA2.into(),
        "semidirect-lsa2" => SEMIDIRECT_LSA2.into(),
        "parakahler-lsa2" => {
            SEMIDIRECT_LSA2.replace("semidirect-lsa2", "parakahler-lsa2")
                + "\n[paracomplex]\ne1_dual = -e1_dual\ne2_dual = -e2_dual\n"
        }
        "twist-r2" => TWIST_R2.into(),
        _ => return None,
    })
}

/// The sphere with `z` replaced by `z + 1` in the anchor; the stated
/// bracket and star no longer fit.
pub fn broken_sphere() -> String {
    SPHERE
        .replace("name = sphere", "name = broken_sphere")
        .replace("e2 = z*p_y - y*p_z", "e2 = (z + 1)*p_y - y*p_z")
}
