/// Expands codes into bits, `bits_per_code` per code, least significant
/// bit first.
pub fn codes_to_bits(codes: &[u16], bits_per_code: u32) -> Vec<u8> {
    let mut out = Vec::with_capacity(codes.len() * bits_per_code as usize);
    for &c in codes {
        for b in 0..bits_per_code {
            out.push(((c >> b) & 1) as u8);
        }
    }
    out
}

/// Packs bits into bytes, first bit in the least significant position; a
/// trailing partial byte is zero-padded.
pub fn pack_bits(bits: &[u8]) -> Vec<u8> {
    bits.chunks(8)
        .map(|chunk| chunk.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | ((b & 1) << i)))
        .collect()
}

/// Inverse of [`pack_bits`] for the first `n_bits` bits.
pub fn unpack_bits(bytes: &[u8], n_bits: usize) -> Vec<u8> {
    (0..n_bits).map(|i| (bytes[i / 8] >> (i % 8)) & 1).collect()
}
