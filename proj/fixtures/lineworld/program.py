# cwm-native: lineworld size=10 goal=9
class Environment:
    def __init__(self, size=10, goal=9):
        self.size = size
        self.goal = goal
        self.state = 0

    def set_state(self, state):
        self.state = int(state)

    def step(self, action):
        if action == 0:
            self.state = max(self.state - 1, 0)
        else:
            self.state = min(self.state + 1, self.size - 1)
        done = self.state == self.goal
        reward = 1.0 if done else 0.0
        return self.state, reward, done
