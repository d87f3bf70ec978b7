//! Plain-text TRIMESH2D mesh files.
//!
//! ```text
//! TRIMESH2D
//! VERTICES <n>
//! <x> <y>                      (n lines)
//! ELEMENTS <m>
//! <v1> <v2> <v3>               (1-based, counterclockwise)
//! BOUNDARY <tag> <count>
//! <element> <face>             (1-based)
//! PERIODIC <count>
//! <e1> <f1> <e2> <f2> <sx> <sy>
//! ```
//!
//! Blank lines and `#` comments are ignored. Coordinates are written with
//! 17 significant digits so a write/read cycle is exact.

use std::fmt::Write as _;
use std::path::Path;

use super::MeshGeometry;
use crate::error::{Error, Result};

pub fn format_trimesh(mesh: &MeshGeometry) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "TRIMESH2D");
    let _ = writeln!(out, "VERTICES {}", mesh.vertices.len());
    for p in &mesh.vertices {
        let _ = writeln!(out, "{:.16e} {:.16e}", p[0], p[1]);
    }
    let _ = writeln!(out, "ELEMENTS {}", mesh.elements.len());
    for e in &mesh.elements {
        let _ = writeln!(out, "{} {} {}", e[0] + 1, e[1] + 1, e[2] + 1);
    }
    for (t, name) in mesh.tag_names.iter().enumerate() {
        let faces: Vec<(usize, usize)> = mesh
            .boundary_faces()
            .into_iter()
            .filter(|&(k, f)| mesh.face_tags[k][f] == Some(t))
            .collect();
        let _ = writeln!(out, "BOUNDARY {} {}", name, faces.len());
        for (k, f) in faces {
            let _ = writeln!(out, "{} {}", k + 1, f + 1);
        }
    }
    if !mesh.periodic_pairs.is_empty() {
        let _ = writeln!(out, "PERIODIC {}", mesh.periodic_pairs.len());
        for p in &mesh.periodic_pairs {
            let _ = writeln!(
                out,
                "{} {} {} {} {:.16e} {:.16e}",
                p.a.0 + 1,
                p.a.1 + 1,
                p.b.0 + 1,
                p.b.1 + 1,
                p.shift[0],
                p.shift[1]
            );
        }
    }
    out
}

pub fn write_trimesh(mesh: &MeshGeometry, path: &Path) -> Result<()> {
    std::fs::write(path, format_trimesh(mesh))?;
    Ok(())
}

pub fn read_trimesh(path: &Path) -> Result<MeshGeometry> {
    parse_trimesh(&std::fs::read_to_string(path)?)
}

/// Numbered, tokenized, non-empty lines.
type TokenLines<'a> = Box<dyn Iterator<Item = (usize, Vec<&'a str>)> + 'a>;

struct Lines<'a> {
    inner: std::iter::Peekable<TokenLines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let it: TokenLines<'a> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| {
                    (
                        i + 1,
                        l.split('#')
                            .next()
                            .unwrap_or("")
                            .split_whitespace()
                            .collect::<Vec<_>>(),
                    )
                })
                .filter(|(_, t)| !t.is_empty()),
        );
        Self {
            inner: it.peekable(),
            last: 0,
        }
    }

    fn next(&mut self) -> Result<(usize, Vec<&'a str>)> {
        match self.inner.next() {
            Some((n, t)) => {
                self.last = n;
                Ok((n, t))
            }
            None => Err(Error::Parse {
                line: self.last + 1,
                message: "unexpected end of file".into(),
            }),
        }
    }
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn num<T: std::str::FromStr>(line: usize, tok: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| err(line, format!("cannot parse '{tok}'")))
}

fn index(line: usize, tok: &str, len: usize, what: &str) -> Result<usize> {
    let i: usize = num(line, tok)?;
    if i == 0 || i > len {
        return Err(err(
            line,
            format!("{what} index {i} out of range 1..={len}"),
        ));
    }
    Ok(i - 1)
}

fn header<'a>(lines: &mut Lines<'a>, key: &str) -> Result<(usize, Vec<&'a str>)> {
    let (n, t) = lines.next()?;
    if t[0] != key {
        return Err(err(n, format!("expected {key}, found '{}'", t[0])));
    }
    Ok((n, t))
}

pub fn parse_trimesh(text: &str) -> Result<MeshGeometry> {
    let mut lines = Lines::new(text);
    let (n, t) = lines.next()?;
    if t != ["TRIMESH2D"] {
        return Err(err(n, "missing TRIMESH2D header"));
    }
    let (n, t) = header(&mut lines, "VERTICES")?;
    let nv: usize = num(n, t.get(1).ok_or_else(|| err(n, "missing vertex count"))?)?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (n, t) = lines.next()?;
        if t.len() != 2 {
            return Err(err(n, "expected two coordinates"));
        }
        vertices.push([num(n, t[0])?, num(n, t[1])?]);
    }
    let (n, t) = header(&mut lines, "ELEMENTS")?;
    let ne: usize = num(n, t.get(1).ok_or_else(|| err(n, "missing element count"))?)?;
    let mut elements = Vec::with_capacity(ne);
    for _ in 0..ne {
        let (n, t) = lines.next()?;
        if t.len() != 3 {
            return Err(err(n, "expected three vertex indices"));
        }
        elements.push([
            index(n, t[0], nv, "vertex")?,
            index(n, t[1], nv, "vertex")?,
            index(n, t[2], nv, "vertex")?,
        ]);
    }
    let mut mesh = MeshGeometry::from_parts(vertices, elements)?;
    let mut tagged: Vec<((usize, usize), usize)> = Vec::new();
    while let Some((n, t)) = lines.inner.next() {
        lines.last = n;
        match t[0] {
            "BOUNDARY" => {
                if t.len() != 3 {
                    return Err(err(n, "expected BOUNDARY <tag> <count>"));
                }
                let tag = mesh.tag_names.len();
                mesh.tag_names.push(t[1].to_string());
                let count: usize = num(n, t[2])?;
                for _ in 0..count {
                    let (n, t) = lines.next()?;
                    if t.len() != 2 {
                        return Err(err(n, "expected <element> <face>"));
                    }
                    let k = index(n, t[0], ne, "element")?;
                    let f = index(n, t[1], 3, "face")?;
                    tagged.push(((k, f), tag));
                }
            }
            "PERIODIC" => {
                let count: usize = num(n, t.get(1).ok_or_else(|| err(n, "missing count"))?)?;
                for _ in 0..count {
                    let (n, t) = lines.next()?;
                    if t.len() != 6 {
                        return Err(err(n, "expected <e1> <f1> <e2> <f2> <sx> <sy>"));
                    }
                    let a = (index(n, t[0], ne, "element")?, index(n, t[1], 3, "face")?);
                    let b = (index(n, t[2], ne, "element")?, index(n, t[3], 3, "face")?);
                    if !mesh.is_boundary_face(a.0, a.1) || !mesh.is_boundary_face(b.0, b.1) {
                        return Err(err(n, "periodic face is not on the boundary"));
                    }
                    let shift = [num(n, t[4])?, num(n, t[5])?];
                    mesh.link_periodic(a, b, shift, true);
                }
            }
            other => return Err(err(n, format!("unknown section '{other}'"))),
        }
    }
    for ((k, f), tag) in tagged {
        if !mesh.is_boundary_face(k, f) {
            return Err(Error::Tagging(format!(
                "face {} of element {} is not a boundary face",
                f + 1,
                k + 1
            )));
        }
        mesh.face_tags[k][f] = Some(tag);
    }
    Ok(mesh)
}
