// SPDX-License-Identifier: Apache-2.0
#include "sphmp/ingest.hpp"

#include <array>
#include <cctype>
#include <stdexcept>

namespace sphmp {
namespace {

constexpr std::array<std::string_view, kMaxAtomicNumber + 1> kSymbols = {
    "",   "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na", "Mg", "Al", "Si",
    "P",  "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",  "Cr", "Mn", "Fe", "Co", "Ni", "Cu",
    "Zn", "Ga", "Ge", "As", "Se", "Br", "Kr", "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru",
    "Rh", "Pd", "Ag", "Cd", "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr",
    "Nd", "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W",
    "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi", "Po", "At", "Rn"};

}  // namespace

std::string_view element_symbol(int z) {
  if (z < 1 || z > kMaxAtomicNumber) {
    throw std::out_of_range("atomic number out of supported range [1, 86]: " + std::to_string(z));
  }
  return kSymbols[static_cast<std::size_t>(z)];
}

std::optional<int> atomic_number(std::string_view symbol) {
  if (symbol.empty() || symbol.size() > 2) return std::nullopt;
  std::string norm;
  norm += static_cast<char>(std::toupper(static_cast<unsigned char>(symbol[0])));
  if (symbol.size() == 2) norm += static_cast<char>(std::tolower(static_cast<unsigned char>(symbol[1])));
  for (int z = 1; z <= kMaxAtomicNumber; ++z) {
    if (kSymbols[static_cast<std::size_t>(z)] == norm) return z;
  }
  return std::nullopt;
}

}  // namespace sphmp
