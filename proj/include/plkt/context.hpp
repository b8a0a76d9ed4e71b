#pragma once

namespace plkt {

class Rng;

// Forward-pass context: dropout is active only when training with a rate > 0
// and an RNG stream to draw masks from.
struct ForwardCtx {
    bool train = false;
    double dropout = 0.0;
    Rng* rng = nullptr;

    bool dropout_active() const { return train && dropout > 0.0 && rng != nullptr; }
};

} // namespace plkt
