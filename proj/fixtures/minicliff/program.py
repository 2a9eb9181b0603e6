# cwm-native: minicliff
class Environment:
    ROWS, COLS = 3, 4
    START, GOAL = 8, 11
    CLIFF = (9, 10)

    def __init__(self):
        self.state = self.START

    def set_state(self, state):
        self.state = int(state)

    def step(self, action):
        row, col = divmod(self.state, self.COLS)
        if action == 0:
            row = max(row - 1, 0)
        elif action == 1:
            col = min(col + 1, self.COLS - 1)
        elif action == 2:
            row = min(row + 1, self.ROWS - 1)
        else:
            col = max(col - 1, 0)
        nxt = row * self.COLS + col
        if nxt in self.CLIFF:
            self.state = self.START
            return self.state, -100.0, False
        self.state = nxt
        return self.state, -1.0, nxt == self.GOAL
