//! Wiring diagrams of interference terms for depolarising channels.
//!
//! A term `𝒩_{ππ′}` is drawn as two columns of `N` boxes: the left column
//! holds the ket-side ordering `π`, the right column the bra-side ordering
//! `π′`. Slot `a` (1-based) of a column holds the `a`-th channel applied, so
//! slot 1 sits at the bottom next to the input and slot `N` at the top next
//! to the output.
//!
//! A depolarising channel splits vertically into an unconnected top and bottom
//! half, and the sum over its Kraus operators becomes a cap joining the same
//! half of the same channel across the two columns. The endpoints of the
//! diagram are therefore `(side, slot, port)` triples joined by three kinds of
//! wire:
//!
//! * caps joining `(Left, π⁻¹(i), port)` and `(Right, π′⁻¹(i), port)` for each
//!   channel `i` and port,
//! * vertical wires joining `(side, a, Top)` and `(side, a + 1, Bottom)` inside
//!   a column,
//! * closures added by [`modify_diagram`], joining the two output legs
//!   `(Left, N, Top)` and `(Right, N, Top)`, and the two input legs
//!   `(Left, 1, Bottom)` and `(Right, 1, Bottom)`.
//!
//! Every endpoint meets one cap and at most one other wire, so components are
//! paths or closed loops. A closed loop is a free index sum and contributes a
//! factor `d`. Nothing here is evaluated numerically.

use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::perm::Permutation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Port {
    Top,
    Bottom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Endpoint {
    pub side: Side,
    /// 1-based position in the column, 1 = first channel applied.
    pub slot: usize,
    pub port: Port,
}

impl Endpoint {
    pub const fn new(side: Side, slot: usize, port: Port) -> Self {
        Self { side, slot, port }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = match self.side {
            Side::Left => 'L',
            Side::Right => 'R',
        };
        let port = match self.port {
            Port::Top => 'T',
            Port::Bottom => 'B',
        };
        write!(f, "{side}{}{port}", self.slot)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WireKind {
    /// Kraus sum of the given channel label.
    Cap(usize),
    Vertical,
    Closure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Wire {
    pub a: Endpoint,
    pub b: Endpoint,
    pub kind: WireKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WiringDiagram {
    n: usize,
    wires: Vec<Wire>,
    open: Vec<Endpoint>,
}

impl WiringDiagram {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn wires(&self) -> &[Wire] {
        &self.wires
    }

    /// Endpoints with no wire besides their cap.
    pub fn open_endpoints(&self) -> &[Endpoint] {
        &self.open
    }

    pub fn is_closed(&self) -> bool {
        self.open.is_empty()
    }

    fn index(&self, e: Endpoint) -> usize {
        let side = match e.side {
            Side::Left => 0,
            Side::Right => 1,
        };
        let port = match e.port {
            Port::Top => 0,
            Port::Bottom => 1,
        };
        (side * self.n + (e.slot - 1)) * 2 + port
    }

    /// Root label for every endpoint, and per root whether every endpoint in
    /// the component has degree two.
    fn components(&self) -> (Vec<usize>, Vec<bool>) {
        let count = 4 * self.n;
        let mut parent: Vec<usize> = (0..count).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut degree = vec![0usize; count];
        for w in &self.wires {
            let (a, b) = (self.index(w.a), self.index(w.b));
            degree[a] += 1;
            degree[b] += 1;
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
        let roots: Vec<usize> = (0..count).map(|x| find(&mut parent, x)).collect();
        let mut closed = vec![true; count];
        for x in 0..count {
            if degree[x] != 2 {
                closed[roots[x]] = false;
            }
        }
        (roots, closed)
    }

    /// GraphViz rendering; node names are `(side, slot, port)` tags such as
    /// `L3T`.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph wiring {\n");
        for side in [Side::Left, Side::Right] {
            for slot in 1..=self.n {
                for port in [Port::Top, Port::Bottom] {
                    let e = Endpoint::new(side, slot, port);
                    let _ = writeln!(s, "  {e};");
                }
            }
        }
        for w in &self.wires {
            let label = match w.kind {
                WireKind::Cap(i) => format!("cap {i}"),
                WireKind::Vertical => "wire".to_string(),
                WireKind::Closure => "closure".to_string(),
            };
            let _ = writeln!(s, "  {} -- {} [label=\"{label}\"];", w.a, w.b);
        }
        s.push_str("}\n");
        s
    }
}

pub fn build_diagram(pi: &Permutation, pi_prime: &Permutation) -> Result<WiringDiagram> {
    let n = pi.len();
    if pi_prime.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            found: pi_prime.len(),
        });
    }
    let (left_slot, right_slot) = (pi.inverse(), pi_prime.inverse());
    let mut wires = Vec::with_capacity(4 * n);
    for label in 1..=n {
        for port in [Port::Top, Port::Bottom] {
            wires.push(Wire {
                a: Endpoint::new(Side::Left, left_slot.apply(label), port),
                b: Endpoint::new(Side::Right, right_slot.apply(label), port),
                kind: WireKind::Cap(label),
            });
        }
    }
    for side in [Side::Left, Side::Right] {
        for a in 1..n {
            wires.push(Wire {
                a: Endpoint::new(side, a, Port::Top),
                b: Endpoint::new(side, a + 1, Port::Bottom),
                kind: WireKind::Vertical,
            });
        }
    }
    let open = vec![
        Endpoint::new(Side::Left, n, Port::Top),
        Endpoint::new(Side::Left, 1, Port::Bottom),
        Endpoint::new(Side::Right, n, Port::Top),
        Endpoint::new(Side::Right, 1, Port::Bottom),
    ];
    Ok(WiringDiagram { n, wires, open })
}

/// Joins the two output legs and the two input legs, closing the diagram.
pub fn modify_diagram(dg: &WiringDiagram) -> Result<WiringDiagram> {
    if dg.is_closed() {
        return Err(Error::Diagram("diagram is already closed".into()));
    }
    let n = dg.n;
    let mut wires = dg.wires.clone();
    for (slot, port) in [(n, Port::Top), (1, Port::Bottom)] {
        wires.push(Wire {
            a: Endpoint::new(Side::Left, slot, port),
            b: Endpoint::new(Side::Right, slot, port),
            kind: WireKind::Closure,
        });
    }
    Ok(WiringDiagram {
        n,
        wires,
        open: Vec::new(),
    })
}

/// Number of connected components that are closed loops.
pub fn count_loops(dg: &WiringDiagram) -> usize {
    let (roots, closed) = dg.components();
    roots
        .iter()
        .enumerate()
        .filter(|&(x, &r)| x == r && closed[r])
        .count()
}

/// Whether the input leg and the output leg of the left column lie on one
/// path, i.e. the term carries the input to the output.
pub fn is_information_transmitting(dg: &WiringDiagram) -> Result<bool> {
    if dg.is_closed() {
        return Err(Error::Diagram(
            "connectivity is defined on the unmodified diagram".into(),
        ));
    }
    let (roots, _) = dg.components();
    let top = dg.index(Endpoint::new(Side::Left, dg.n, Port::Top));
    let bottom = dg.index(Endpoint::new(Side::Left, 1, Port::Bottom));
    Ok(roots[top] == roots[bottom])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[usize]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    #[test]
    fn two_channel_off_diagonal() {
        let dg = build_diagram(&p(&[1, 2]), &p(&[2, 1])).unwrap();
        assert_eq!(dg.wires().len(), 6);
        assert_eq!(dg.open_endpoints().len(), 4);
        assert_eq!(count_loops(&dg), 0);
        assert!(is_information_transmitting(&dg).unwrap());
        // L2T → R1T → R2B → L1B and R2T → L1T → L2B → R1B
        let closed = modify_diagram(&dg).unwrap();
        assert_eq!(count_loops(&closed), 1);
    }

    #[test]
    fn two_channel_diagonal() {
        let dg = build_diagram(&p(&[1, 2]), &p(&[1, 2])).unwrap();
        assert_eq!(count_loops(&dg), 1);
        assert!(!is_information_transmitting(&dg).unwrap());
        assert_eq!(count_loops(&modify_diagram(&dg).unwrap()), 3);
    }

    #[test]
    fn three_channel_cyclic_has_one_loop() {
        let dg = build_diagram(&p(&[1, 2, 3]), &p(&[2, 3, 1])).unwrap();
        assert_eq!(count_loops(&dg), 1);
        assert!(is_information_transmitting(&dg).unwrap());
        assert_eq!(count_loops(&modify_diagram(&dg).unwrap()), 2);
    }

    #[test]
    fn diagonal_terms_never_transmit() {
        for n in 1..=5 {
            for q in Permutation::all(n) {
                let dg = build_diagram(&q, &q).unwrap();
                assert!(!is_information_transmitting(&dg).unwrap());
                assert_eq!(count_loops(&dg), n - 1);
            }
        }
    }

    #[test]
    fn closed_diagram_errors() {
        let dg = modify_diagram(&build_diagram(&p(&[1, 2]), &p(&[2, 1])).unwrap()).unwrap();
        assert!(dg.is_closed());
        assert!(modify_diagram(&dg).is_err());
        assert!(is_information_transmitting(&dg).is_err());
        assert!(build_diagram(&p(&[1, 2]), &p(&[1, 2, 3])).is_err());
    }

    #[test]
    fn every_endpoint_has_one_cap() {
        let dg = build_diagram(&p(&[3, 1, 4, 2]), &p(&[2, 4, 1, 3])).unwrap();
        let mut caps = std::collections::HashMap::new();
        for w in dg
            .wires()
            .iter()
            .filter(|w| matches!(w.kind, WireKind::Cap(_)))
        {
            *caps.entry(w.a).or_insert(0) += 1;
            *caps.entry(w.b).or_insert(0) += 1;
        }
        assert_eq!(caps.len(), 16);
        assert!(caps.values().all(|&c| c == 1));
    }

    #[test]
    fn dot_dump_names_endpoints() {
        let dot = build_diagram(&p(&[1, 2]), &p(&[2, 1])).unwrap().to_dot();
        assert!(dot.starts_with("graph wiring {"));
        assert!(dot.contains("L1B -- R2B [label=\"cap 1\"]"));
        assert!(dot.contains("L1T -- L2B [label=\"wire\"]"));
    }
}
