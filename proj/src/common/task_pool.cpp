/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/
#include <cityforge/common/task_pool.hpp>

#include <spdlog/spdlog.h>

namespace cityforge {

void Strand::post(std::function<void()> task) {
    pool_.taskPosted();
    bool needsSchedule = false;
    {
        std::lock_guard lock(mutex_);
        tasks_.push_back(std::move(task));
        if (!scheduled_) {
            scheduled_ = true;
            needsSchedule = true;
        }
    }
    if (needsSchedule) {
        pool_.schedule(shared_from_this());
    }
}

// Runs the head task; returns true when more work remains and the strand must be requeued.
bool Strand::runOne() {
    std::function<void()> task;
    {
        std::lock_guard lock(mutex_);
        task = std::move(tasks_.front());
        tasks_.pop_front();
    }
    try {
        task();
    } catch (const std::exception& e) {
        spdlog::error("strand task failed: {}", e.what());
    }
    std::lock_guard lock(mutex_);
    if (tasks_.empty()) {
        scheduled_ = false;
        return false;
    }
    return true;
}

TaskPool::TaskPool(std::size_t workers) {
    if (workers == 0) {
        workers = 1;
    }
    for (std::size_t i = 0; i < workers; ++i) {
        workers_.emplace_back([this] { workerLoop(); });
    }
}

TaskPool::~TaskPool() {
    waitIdle();
    {
        std::lock_guard lock(mutex_);
        stopping_ = true;
    }
    ready_.notify_all();
    for (auto& worker : workers_) {
        worker.join();
    }
}

std::shared_ptr<Strand> TaskPool::makeStrand() { return std::shared_ptr<Strand>(new Strand(*this)); }

void TaskPool::waitIdle() {
    std::unique_lock lock(mutex_);
    idle_.wait(lock, [this] { return outstanding_ == 0; });
}

void TaskPool::schedule(std::shared_ptr<Strand> strand) {
    {
        std::lock_guard lock(mutex_);
        queue_.push_back(std::move(strand));
    }
    ready_.notify_one();
}

void TaskPool::taskPosted() {
    std::lock_guard lock(mutex_);
    ++outstanding_;
}

void TaskPool::taskFinished() {
    std::lock_guard lock(mutex_);
    if (--outstanding_ == 0) {
        idle_.notify_all();
    }
}

void TaskPool::workerLoop() {
    while (true) {
        std::shared_ptr<Strand> strand;
        {
            std::unique_lock lock(mutex_);
            ready_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
            if (queue_.empty()) {
                return;
            }
            strand = std::move(queue_.front());
            queue_.pop_front();
        }
        const bool more = strand->runOne();
        taskFinished();
        if (more) {
            schedule(std::move(strand));
        }
    }
}

}// namespace cityforge
