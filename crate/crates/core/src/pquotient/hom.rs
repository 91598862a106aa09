use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::group::Group;
use crate::pcp::{Definition, Exps, PcGroup, SubgroupBasis, Word};

/// A homomorphism from a PC group, stored as the images of its PC generators. Only
/// constructed after every PC relation has been checked in the target.
#[derive(Clone, Debug)]
pub struct Homomorphism<D: Group> {
    src: PcGroup,
    dst: D,
    images: Vec<D::Elem>,
}

fn word_image<D: Group>(dst: &D, images: &[D::Elem], w: &Word) -> D::Elem {
    let mut acc = dst.identity();
    for &(g, e) in w {
        acc = dst.mul(&acc, &dst.pow(&images[g], e as i64));
    }
    acc
}

impl<D: Group + Clone> Homomorphism<D> {
    /// Checks the power and commutator relations of `src` on the given generator images.
    pub fn from_pc_images(src: &PcGroup, dst: &D, images: Vec<D::Elem>) -> Result<Self> {
        let pcp = src.pcp();
        let m = pcp.ngens();
        if images.len() != m {
            return Err(Error::Invalid(format!("expected {m} images, got {}", images.len())));
        }
        let p = pcp.p() as i64;
        for i in 0..m {
            let lhs = dst.pow(&images[i], p);
            if lhs != word_image(dst, &images, pcp.power_rel(i)) {
                return Err(Error::RelationViolated {
                    relation: format!("g{}^{}", i + 1, p),
                });
            }
            for j in 0..i {
                let lhs = dst.comm(&images[i], &images[j]);
                if lhs != word_image(dst, &images, pcp.comm_rel(i, j)) {
                    return Err(Error::RelationViolated {
                        relation: format!("[g{}, g{}]", i + 1, j + 1),
                    });
                }
            }
        }
        Ok(Homomorphism {
            src: src.clone(),
            dst: dst.clone(),
            images,
        })
    }

    /// Extends images of the defining generators along the definitions of the PC
    /// generators, then checks all relations and that each `src_gens[f]` lands on
    /// `gen_images[f]`.
    pub fn from_defining_images(
        src: &PcGroup,
        src_gens: &[Exps],
        dst: &D,
        gen_images: &[D::Elem],
    ) -> Result<Self> {
        if src_gens.len() != gen_images.len() {
            return Err(Error::Invalid("one image per defining generator required".into()));
        }
        let pcp = src.pcp();
        let p = pcp.p() as i64;
        let mut images: Vec<D::Elem> = Vec::with_capacity(pcp.ngens());
        for d in pcp.definitions() {
            let lhs = match d {
                Definition::Image { gen, .. } => gen_images
                    .get(*gen)
                    .cloned()
                    .ok_or(Error::BadGenerator(*gen))?,
                Definition::Power { base, .. } => dst.pow(&images[*base], p),
                Definition::Commutator { hi, lo, .. } => dst.comm(&images[*hi], &images[*lo]),
            };
            let corr = word_image(dst, &images, d.correction());
            images.push(dst.mul(&dst.inv(&corr), &lhs));
        }
        let h = Self::from_pc_images(src, dst, images)?;
        for (f, (x, img)) in src_gens.iter().zip(gen_images).enumerate() {
            if h.apply(x) != *img {
                return Err(Error::RelationViolated {
                    relation: format!("image of defining generator {}", f + 1),
                });
            }
        }
        Ok(h)
    }

    pub fn src(&self) -> &PcGroup {
        &self.src
    }

    pub fn dst(&self) -> &D {
        &self.dst
    }

    pub fn images(&self) -> &[D::Elem] {
        &self.images
    }

    pub fn apply(&self, x: &[u8]) -> D::Elem {
        let mut acc = self.dst.identity();
        for (i, &e) in x.iter().enumerate() {
            if e != 0 {
                acc = self.dst.mul(&acc, &self.dst.pow(&self.images[i], e as i64));
            }
        }
        acc
    }

    pub fn is_surjective(&self) -> bool {
        self.dst.generates(&self.images)
    }
}

/// `Ker(h) ∩ λ_{n-1}(src)`, where `λ_{n-1}` must be central elementary abelian.
///
/// `h` is linear on the layer; the images are tabulated as the span grows, and every
/// layer generator whose image is already in the span contributes a kernel vector.
pub fn kernel_meet_layer<D: Group + Clone>(h: &Homomorphism<D>, n: u32) -> Result<SubgroupBasis> {
    if n < 2 {
        return Err(Error::Invalid("layer index n - 1 must be positive".into()));
    }
    let g = h.src();
    let p = g.p();
    let range = g.pcp().weight_range(n - 1);
    let layer = SubgroupBasis::from_generator_range(g, range.clone());
    if !layer.is_central_elementary {
        return Err(Error::NotCentral(format!("λ_{}", n - 1)));
    }
    let dst = h.dst();
    let r = range.len();
    let mut table: HashMap<D::Elem, Vec<u32>> = HashMap::new();
    table.insert(dst.identity(), vec![0; r]);
    let mut kernel = Vec::new();
    for (k, gi) in range.clone().enumerate() {
        let img = h.images()[gi].clone();
        if let Some(c) = table.get(&img) {
            // g_gi * prod(g^-c) lies in the kernel.
            let mut v = g.unit(gi);
            for (kk, &ck) in c.iter().enumerate() {
                if ck != 0 {
                    v[range.start + kk] = ((v[range.start + kk] as u32 + p - ck) % p) as u8;
                }
            }
            kernel.push(v);
        } else {
            let entries: Vec<(D::Elem, Vec<u32>)> =
                table.iter().map(|(a, b)| (a.clone(), b.clone())).collect();
            let mut pw = dst.identity();
            for a in 1..p {
                pw = dst.mul(&pw, &img);
                for (e, c) in &entries {
                    let mut c2 = c.clone();
                    c2[k] = a;
                    table.insert(dst.mul(e, &pw), c2);
                }
            }
        }
    }
    Ok(SubgroupBasis::closure(g, &kernel))
}
