//! Binary containers, all integers little-endian.
//!
//! PCST: `"PCST"`, u16 version = 1, u8 scalar code (0 = f64), u8 n,
//! n × u64 shape, row-major f64 payload.
//!
//! PCSC: `"PCSC"`, u16 version = 1, u32 p, u8 n, u8 J, n × u64 input shape,
//! u32 record count, then records of u16 level, u32 ν-index, PCST block.
//! The coarse tensor is `(0, 0)`; detail `w_{ν,j}` is `(j, position of ν in Γ)`.

use std::io::{Read, Write};

use crate::error::{Error, Result};

use super::{MultiresCoeffs, Tensor};

pub const TENSOR_MAGIC: &[u8; 4] = b"PCST";
pub const COEFFS_MAGIC: &[u8; 4] = b"PCSC";
pub const VERSION: u16 = 1;
pub const SCALAR_F64: u8 = 0;

fn read_array<const N: usize>(r: &mut impl Read) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

fn read_u8(r: &mut impl Read) -> Result<u8> {
    Ok(read_array::<1>(r)?[0])
}

fn read_u16(r: &mut impl Read) -> Result<u16> {
    Ok(u16::from_le_bytes(read_array(r)?))
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    Ok(u32::from_le_bytes(read_array(r)?))
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    Ok(u64::from_le_bytes(read_array(r)?))
}

fn expect_header(r: &mut impl Read, magic: &[u8; 4]) -> Result<()> {
    let got: [u8; 4] = read_array(r)?;
    if &got != magic {
        return Err(Error::Parse(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&got),
            String::from_utf8_lossy(magic)
        )));
    }
    let version = read_u16(r)?;
    if version != VERSION {
        return Err(Error::Parse(format!("unsupported version {version}")));
    }
    Ok(())
}

fn read_shape(r: &mut impl Read, n: usize) -> Result<Vec<usize>> {
    (0..n)
        .map(|_| {
            let s = read_u64(r)?;
            usize::try_from(s).map_err(|_| Error::Parse(format!("axis length {s} too large")))
        })
        .collect()
}

pub fn write_tensor(w: &mut impl Write, t: &Tensor<f64>) -> Result<()> {
    w.write_all(TENSOR_MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&[SCALAR_F64, t.dim() as u8])?;
    for &s in t.shape() {
        w.write_all(&(s as u64).to_le_bytes())?;
    }
    let mut buf = Vec::with_capacity(t.len() * 8);
    for v in t.data() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_tensor(r: &mut impl Read) -> Result<Tensor<f64>> {
    expect_header(r, TENSOR_MAGIC)?;
    let code = read_u8(r)?;
    if code != SCALAR_F64 {
        return Err(Error::Parse(format!("unsupported scalar code {code}")));
    }
    let n = read_u8(r)? as usize;
    if n == 0 {
        return Err(Error::Parse("tensor with zero axes".into()));
    }
    let shape = read_shape(r, n)?;
    let len = shape
        .iter()
        .try_fold(1usize, |a, &s| a.checked_mul(s))
        .ok_or_else(|| Error::Parse("tensor too large".into()))?;
    let mut bytes = vec![0u8; len * 8];
    r.read_exact(&mut bytes)?;
    let data = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    Tensor::new(shape, data)
}

pub fn write_coeffs(w: &mut impl Write, c: &MultiresCoeffs<f64>) -> Result<()> {
    w.write_all(COEFFS_MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(c.p as u32).to_le_bytes())?;
    w.write_all(&[c.input_shape.len() as u8, c.levels as u8])?;
    for &s in &c.input_shape {
        w.write_all(&(s as u64).to_le_bytes())?;
    }
    let records = 1 + c.details.iter().map(Vec::len).sum::<usize>();
    w.write_all(&(records as u32).to_le_bytes())?;
    w.write_all(&0u16.to_le_bytes())?;
    w.write_all(&0u32.to_le_bytes())?;
    write_tensor(w, &c.coarse)?;
    for (j, level) in c.details.iter().enumerate() {
        for (i, t) in level.iter().enumerate() {
            w.write_all(&(j as u16).to_le_bytes())?;
            w.write_all(&((i + 1) as u32).to_le_bytes())?;
            write_tensor(w, t)?;
        }
    }
    Ok(())
}

pub fn read_coeffs(r: &mut impl Read) -> Result<MultiresCoeffs<f64>> {
    expect_header(r, COEFFS_MAGIC)?;
    let p = read_u32(r)? as i64;
    let n = read_u8(r)? as usize;
    let levels = read_u8(r)? as usize;
    let input_shape = read_shape(r, n)?;
    let records = read_u32(r)? as usize;
    if p < 2 {
        return Err(Error::Parse(format!("invalid dilation {p}")));
    }
    let q = (p as usize).pow(n as u32);
    if records != 1 + levels * (q - 1) {
        return Err(Error::Parse(format!(
            "{records} records, expected {}",
            1 + levels * (q - 1)
        )));
    }
    let mut coarse = None;
    let mut details: Vec<Vec<Option<Tensor<f64>>>> = vec![vec![None; q - 1]; levels];
    for _ in 0..records {
        let level = read_u16(r)? as usize;
        let nu = read_u32(r)? as usize;
        let t = read_tensor(r)?;
        let slot = if nu == 0 {
            if level != 0 {
                return Err(Error::Parse(format!("coarse record tagged with level {level}")));
            }
            &mut coarse
        } else {
            details
                .get_mut(level)
                .and_then(|l| l.get_mut(nu - 1))
                .ok_or_else(|| Error::Parse(format!("record ({level}, {nu}) out of range")))?
        };
        if slot.replace(t).is_some() {
            return Err(Error::Parse(format!("record ({level}, {nu}) repeated")));
        }
    }
    let coarse = coarse.ok_or_else(|| Error::Parse("missing coarse record".into()))?;
    let details = details
        .into_iter()
        .map(|l| l.into_iter().collect::<Option<Vec<_>>>())
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Parse("missing detail record".into()))?;
    let c = MultiresCoeffs {
        p,
        levels,
        input_shape,
        coarse,
        details,
    };
    c.validate(q)?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tensor_round_trip_and_layout() {
        let t = Tensor::new(vec![2, 3], (0..6).map(|v| v as f64 * 0.5).collect()).unwrap();
        let mut buf = Vec::new();
        write_tensor(&mut buf, &t).unwrap();
        assert_eq!(&buf[..4], b"PCST");
        assert_eq!(u16::from_le_bytes([buf[4], buf[5]]), 1);
        assert_eq!(buf[6], 0);
        assert_eq!(buf[7], 2);
        assert_eq!(buf.len(), 8 + 16 + 48);
        assert_eq!(read_tensor(&mut buf.as_slice()).unwrap(), t);
    }

    #[test]
    fn rejects_bad_headers() {
        let mut buf = Vec::new();
        write_tensor(&mut buf, &Tensor::new(vec![1], vec![1.0]).unwrap()).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(read_tensor(&mut bad.as_slice()).is_err());
        let mut bad = buf.clone();
        bad[6] = 7;
        assert!(read_tensor(&mut bad.as_slice()).is_err());
        assert!(read_tensor(&mut &buf[..buf.len() - 1]).is_err());
    }

    #[test]
    fn coeffs_round_trip() {
        let z = |s: usize| Tensor::<f64>::from_fn(vec![s], |c| c[0] as f64);
        let c = MultiresCoeffs {
            p: 3,
            levels: 2,
            input_shape: vec![9],
            coarse: z(1),
            details: vec![vec![z(1), z(1)], vec![z(3), z(3)]],
        };
        let mut buf = Vec::new();
        write_coeffs(&mut buf, &c).unwrap();
        assert_eq!(&buf[..4], b"PCSC");
        assert_eq!(read_coeffs(&mut buf.as_slice()).unwrap(), c);
    }
}
