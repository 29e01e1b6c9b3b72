use super::SmfError;

/// Largest value a four-byte VLQ can carry.
pub const VLQ_MAX: u32 = 0x0FFF_FFFF;

/// Decode the variable-length quantity starting at `offset`.
///
/// Returns the value and the number of bytes consumed (1 to 4).
pub fn parse_vlq(bytes: &[u8], offset: usize) -> Result<(u32, usize), SmfError> {
    let mut value = 0u32;
    for i in 0..4 {
        let Some(&b) = bytes.get(offset + i) else {
            return Err(SmfError::MalformedVlq { offset });
        };
        value = (value << 7) | u32::from(b & 0x7F);
        if b & 0x80 == 0 {
            return Ok((value, i + 1));
        }
    }
    Err(SmfError::MalformedVlq { offset })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_vectors() {
        assert_eq!(parse_vlq(&[0x00], 0).unwrap(), (0, 1));
        assert_eq!(parse_vlq(&[0x81, 0x00], 0).unwrap(), (128, 2));
        assert_eq!(parse_vlq(&[0xFF, 0xFF, 0xFF, 0x7F], 0).unwrap(), (VLQ_MAX, 4));
    }

    #[test]
    fn offset_is_respected() {
        assert_eq!(parse_vlq(&[0xAA, 0xC0, 0x00], 1).unwrap(), (0x2000, 2));
    }

    #[test]
    fn five_byte_quantity_rejected() {
        let err = parse_vlq(&[0x80, 0x80, 0x80, 0x80, 0x00], 0).unwrap_err();
        assert_eq!(err, SmfError::MalformedVlq { offset: 0 });
    }

    #[test]
    fn input_ending_mid_quantity() {
        assert_eq!(parse_vlq(&[0x00, 0x81], 1).unwrap_err(), SmfError::MalformedVlq { offset: 1 });
        assert_eq!(parse_vlq(&[], 0).unwrap_err(), SmfError::MalformedVlq { offset: 0 });
    }
}
