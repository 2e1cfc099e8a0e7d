// Brings one exposure to the brightness of another with WHA.
//
//   sample_match_exposure <src> <ref> <out.png>
//
// Both images must show the same (roughly aligned) view.

#include <iostream>

#include "imfkit/imfkit.hpp"

int main(int argc, char** argv) {
  if (argc != 4) {
    std::cerr << "usage: " << argv[0] << " <src> <ref> <out.png>\n";
    return 2;
  }
  try {
    const auto src = imfkit::decode_image(argv[1]);
    const auto ref = imfkit::decode_image(argv[2]);
    auto tables = imfkit::estimate_wha(src, ref);
    for (auto& t : tables) t = imfkit::complete_table(t);
    const auto out = imfkit::apply_imf(src, tables);
    imfkit::encode_png(out, argv[3]);
    std::cout << "PSNR vs reference: " << imfkit::psnr(out, ref) << " dB\n";
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 0;
}
