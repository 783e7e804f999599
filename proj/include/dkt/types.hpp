#pragma once

#include <string>
#include <vector>

namespace dkt {

// One answered exercise: which exercise and whether it was answered
// correctly.
struct Interaction {
    int exercise = 0;
    int correct = 0;  // 0 or 1
};

// One student's time-ordered interaction log.
struct InteractionSequence {
    std::string student_id;
    std::vector<Interaction> steps;

    std::size_t size() const { return steps.size(); }
};

}  // namespace dkt
