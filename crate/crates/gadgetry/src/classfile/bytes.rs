//! Big-endian cursor over a class-file byte buffer.

use super::ClassFileError;

pub(crate) struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8], ClassFileError> {
        if self.remaining() < n {
            return Err(ClassFileError::Truncated { at: self.pos });
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub fn u1(&mut self) -> Result<u8, ClassFileError> {
        Ok(self.take(1)?[0])
    }

    pub fn u2(&mut self) -> Result<u16, ClassFileError> {
        let b = self.take(2)?;
        Ok(u16::from_be_bytes([b[0], b[1]]))
    }

    pub fn u4(&mut self) -> Result<u32, ClassFileError> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    pub fn u8_(&mut self) -> Result<u64, ClassFileError> {
        let b = self.take(8)?;
        Ok(u64::from_be_bytes([
            b[0], b[1], b[2], b[3], b[4], b[5], b[6], b[7],
        ]))
    }

    pub fn i1(&mut self) -> Result<i8, ClassFileError> {
        Ok(self.u1()? as i8)
    }

    pub fn i2(&mut self) -> Result<i16, ClassFileError> {
        Ok(self.u2()? as i16)
    }

    pub fn i4(&mut self) -> Result<i32, ClassFileError> {
        Ok(self.u4()? as i32)
    }
}

pub(crate) trait WriteBytes {
    fn w_u1(&mut self, v: u8);
    fn w_u2(&mut self, v: u16);
    fn w_u4(&mut self, v: u32);
    fn w_u8(&mut self, v: u64);
    fn w_i2(&mut self, v: i16);
    fn w_i4(&mut self, v: i32);
}

impl WriteBytes for Vec<u8> {
    fn w_u1(&mut self, v: u8) {
        self.push(v);
    }
    fn w_u2(&mut self, v: u16) {
        self.extend_from_slice(&v.to_be_bytes());
    }
    fn w_u4(&mut self, v: u32) {
        self.extend_from_slice(&v.to_be_bytes());
    }
    fn w_u8(&mut self, v: u64) {
        self.extend_from_slice(&v.to_be_bytes());
    }
    fn w_i2(&mut self, v: i16) {
        self.extend_from_slice(&v.to_be_bytes());
    }
    fn w_i4(&mut self, v: i32) {
        self.extend_from_slice(&v.to_be_bytes());
    }
}
