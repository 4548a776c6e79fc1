#pragma once

namespace dmtk {

enum class Layout { row_major, col_major };

inline Layout flipped(Layout l) {
    return l == Layout::row_major ? Layout::col_major : Layout::row_major;
}

}  // namespace dmtk
